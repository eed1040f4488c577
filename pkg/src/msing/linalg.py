"""Exact sparse linear algebra over F_p.

Vectors are dicts ``{column: coefficient}`` at the API boundary.  Over
F_2 the rows are stored as Python int bitsets, which makes elimination a
handful of XORs.  Pivots are always the lowest column of a row.
"""

from __future__ import annotations

from .arith import inv_mod


def to_bits(v) -> int:
    x = 0
    for k, c in v.items():
        if c & 1:
            x ^= 1 << k
    return x


def from_bits(x: int) -> dict:
    out = {}
    while x:
        low = x & -x
        out[low.bit_length() - 1] = 1
        x ^= low
    return out


def vadd(p, v, w, c=1):
    """Return v + c*w as a new dict."""
    out = dict(v)
    for k, a in w.items():
        s = (out.get(k, 0) + c * a) % p
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vscale(p, v, c):
    c %= p
    if not c:
        return {}
    return {k: a * c % p for k, a in v.items()}


class Reducer:
    """Incremental row echelon form with optional combination tracking.

    ``add(v, tag)`` either inserts v as a new pivot row and returns None,
    or returns the combination of earlier tags that equals v (so that
    ``{tag: 1} - combo`` is a kernel vector of the tagged map).
    """

    def __init__(self, p: int):
        self.p = p
        self.rows = {}      # pivot -> row (bitset for p = 2, dict otherwise)
        self.combos = {}    # pivot -> combo in the same representation
        self.mask = 0       # p = 2: bitset of pivot columns

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def pivots(self):
        return sorted(self.rows)

    # -- core elimination -------------------------------------------------
    def _reduce2(self, v: int, combo: int):
        rows, combos = self.rows, self.combos
        w = v & self.mask
        while w:
            low = w & -w
            c = low.bit_length() - 1
            v ^= rows[c]
            combo ^= combos[c]
            w = v & self.mask & ~((low << 1) - 1)
        return v, combo

    def _reducep(self, v: dict, combo: dict):
        p, rows, combos = self.p, self.rows, self.combos
        v = dict(v)
        combo = dict(combo)
        done = set()
        while True:
            cand = [k for k in v if k in rows and k not in done]
            if not cand:
                return v, combo
            c = min(cand)
            f = (-v[c]) % p
            for k, a in rows[c].items():
                s = (v.get(k, 0) + f * a) % p
                if s:
                    v[k] = s
                else:
                    v.pop(k, None)
            for k, a in combos[c].items():
                s = (combo.get(k, 0) + f * a) % p
                if s:
                    combo[k] = s
                else:
                    combo.pop(k, None)
            done.add(c)

    # -- public API ------------------------------------------------------
    def reduce(self, v: dict):
        """Return (remainder, combo) with v = remainder + sum combo[t] * row_t."""
        if self.p == 2:
            r, cb = self._reduce2(to_bits(v), 0)
            return from_bits(r), from_bits(cb)
        r, cb = self._reducep(v, {})
        return r, {k: (-a) % self.p for k, a in cb.items()}

    def in_span(self, v: dict) -> bool:
        return not self.reduce(v)[0]

    def solve(self, v: dict):
        """Combination of tags equal to v, or None when v is not in the span."""
        r, cb = self.reduce(v)
        return None if r else cb

    def add(self, v: dict, tag=None):
        p = self.p
        if p == 2:
            start = (1 << tag) if tag is not None else 0
            r, cb = self._reduce2(to_bits(v), start)
            if r:
                c = (r & -r).bit_length() - 1
                self.rows[c] = r
                self.combos[c] = cb
                self.mask |= 1 << c
                return None
            # v + combo-rows = 0, so the combo minus the new tag expresses v
            cb ^= start
            return from_bits(cb)
        start = {tag: 1} if tag is not None else {}
        r, cb = self._reducep(v, start)
        if r:
            c = min(r)
            inv = inv_mod(r[c], p)
            self.rows[c] = {k: a * inv % p for k, a in r.items()}
            self.combos[c] = {k: a * inv % p for k, a in cb.items()}
            return None
        # r = v + sum f_c row_c and cb = start + sum f_c combo_c, so
        # v = -(sum f_c row_c) is the combo (start - cb) of earlier tags.
        out = vadd(p, start, cb, -1)
        return out

    def add_bits(self, v: int, start: int = 0):
        """F_2 fast path working directly on bitsets.

        Returns (inserted, combo_bits) where combo_bits is the reduced
        combination; when not inserted, combo_bits ^ start is the
        combination of earlier tags that equals v.
        """
        r, cb = self._reduce2(v, start)
        if r:
            c = (r & -r).bit_length() - 1
            self.rows[c] = r
            self.combos[c] = cb
            self.mask |= 1 << c
            return True, cb
        return False, cb

    def reduce_bits(self, v: int, start: int = 0):
        return self._reduce2(v, start)


def rank(p: int, vectors) -> int:
    red = Reducer(p)
    for v in vectors:
        red.add(v)
    return red.rank


def kernel(p: int, images):
    """Basis of the kernel of the map sending basis vector i to images[i]."""
    red = Reducer(p)
    out = []
    for i, v in enumerate(images):
        combo = red.add(v, i)
        if combo is not None:
            out.append(vadd(p, {i: 1}, combo, -1))
    return out


def solve(p: int, images, target):
    """Some x with sum x_i images[i] = target, or None."""
    red = Reducer(p)
    for i, v in enumerate(images):
        red.add(v, i)
    return red.solve(target)
