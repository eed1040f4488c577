"""Cobar-complex oracle for Ext over A(n) with trivial coefficients.

With rho = tau = 0 the dual of A(n) is the ordinary Hopf algebra

    E(tau_0, ..., tau_n) (x) F_l[xi_1, ..., xi_n] / (xi_i^(l^(n+1-i)))

with Milnor's coproduct

    psi(xi_k)  = sum_i xi_(k-i)^(l^i) (x) xi_i
    psi(tau_k) = tau_k (x) 1 + sum_i xi_(k-i)^(l^i) (x) tau_i.

Everything here is written from these formulas alone and shares no code
with the Milnor product or the resolution engine, so agreement of the
two Ext computations is a real cross-check.
"""

from __future__ import annotations

from functools import lru_cache

from .linalg import rank


class CobarOracle:
    """Reduced cobar complex of the dual of A(n) at a prime, trivial coefficients."""

    def __init__(self, prime: int, n: int):
        self.p = prime
        self.n = n
        self.tops = tuple(prime ** (n + 1 - i) for i in range(1, n + 1))
        self.monos = self._enumerate()
        self.reduced = [m for m in self.monos if m != (0, (0,) * n)]
        self._psi = {}

    # -- monomials: (E bitmask over tau_0..tau_n, R exponents of xi_1..xi_n)
    def degree(self, m):
        """Homological bidegree (topological, weight)."""
        p = self.p
        E, R = m
        d = w = 0
        for i in range(self.n + 1):
            if E >> i & 1:
                d += 2 * p ** i - 1
                w += p ** i - 1
        for i, r in enumerate(R, start=1):
            d += r * 2 * (p ** i - 1)
            w += r * (p ** i - 1)
        return d, w

    def _enumerate(self):
        out = []

        def rec(i, R):
            if i == self.n:
                for E in range(1 << (self.n + 1)):
                    out.append((E, tuple(R)))
                return
            for r in range(self.tops[i]):
                rec(i + 1, R + [r])

        rec(0, [])
        return out

    def mul(self, x, y):
        """Product of monomials as (coefficient, monomial) or None."""
        (E1, R1), (E2, R2) = x, y
        if E1 & E2:
            return None
        R = tuple(a + b for a, b in zip(R1, R2))
        if any(r >= t for r, t in zip(R, self.tops)):
            return None
        sign = 0
        for j in range(self.n + 1):
            if E2 >> j & 1:
                sign += bin(E1 >> (j + 1)).count("1")
        return (-1) ** sign % self.p, (E1 | E2, R)

    def _tmul(self, X, Y):
        """Product in the tensor square with the Koszul sign."""
        p = self.p
        out = {}
        for (a, b), c in X.items():
            for (a2, b2), c2 in Y.items():
                s = (self.degree(b)[0] * self.degree(a2)[0]) % 2
                l = self.mul(a, a2)
                r = self.mul(b, b2)
                if l is None or r is None:
                    continue
                k = (l[1], r[1])
                v = (out.get(k, 0) + c * c2 * l[0] * r[0] * (-1) ** s) % p
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return out

    def _xi_power(self, k, e):
        """xi_k^e as a monomial, or None when truncated (xi_0 = 1)."""
        R = [0] * self.n
        if k > 0:
            if k > self.n:
                return None
            R[k - 1] = e
            if e >= self.tops[k - 1]:
                return None
        return (0, tuple(R))

    def _gen_psi(self, kind, k):
        one = (0, (0,) * self.n)
        out = {}
        if kind == "tau":
            out[((1 << k, (0,) * self.n), one)] = 1
        for i in range(k + 1):
            left = self._xi_power(k - i, self.p ** i)
            if left is None:
                continue
            if kind == "tau":
                right = (1 << i, (0,) * self.n)
            else:
                right = self._xi_power(i, 1)
                if right is None:
                    continue
            out[(left, right)] = (out.get((left, right), 0) + 1) % self.p
        return out

    def psi(self, m):
        r = self._psi.get(m)
        if r is not None:
            return r
        one = (0, (0,) * self.n)
        acc = {(one, one): 1}
        E, R = m
        for i in range(self.n + 1):
            if E >> i & 1:
                acc = self._tmul(acc, self._gen_psi("tau", i))
        for k, r_k in enumerate(R, start=1):
            g = self._gen_psi("xi", k)
            for _ in range(r_k):
                acc = self._tmul(acc, g)
        self._psi[m] = acc
        return acc

    def psi_reduced(self, m):
        one = (0, (0,) * self.n)
        return {k: c for k, c in self.psi(m).items() if one not in k}

    # -- the complex ---------------------------------------------------------
    def chains(self, s, t, u):
        """Basis of C^s in internal bidegree (t, u): tuples of reduced monomials."""
        return _chains(self, s, t, u)

    def differential(self, chain):
        """d[g_1|...|g_s] = sum_i sum (-1)^e [g_1|...|g_i'|g_i''|...|g_s].

        The sign exponent is i + |g_1| + ... + |g_(i-1)| + |g_i'|, the
        Koszul sign of the shifted bar degrees; it is the choice that
        squares to zero at odd primes.
        """
        p = self.p
        out = {}
        lam = 0
        for i, g in enumerate(chain):
            for (a, b), c in self.psi_reduced(g).items():
                e = i + 1 + lam + self.degree(a)[0]
                key = chain[:i] + (a, b) + chain[i + 1:]
                v = (out.get(key, 0) + c * (-1) ** e) % p
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
            lam += self.degree(g)[0]
        return out

    def d_squared_failures(self, s, t, u):
        bad = []
        for ch in self.chains(s, t, u):
            total = {}
            for k, c in self.differential(ch).items():
                for k2, c2 in self.differential(k).items():
                    total[k2] = (total.get(k2, 0) + c * c2) % self.p
            if any(total.values()):
                bad.append(ch)
        return bad

    def _rank(self, s, t, u):
        if s < 0:
            return 0
        src = self.chains(s, t, u)
        tgt = {k: i for i, k in enumerate(self.chains(s + 1, t, u))}
        rows = [{tgt[k]: c for k, c in self.differential(ch).items()} for ch in src]
        return rank(self.p, rows)

    def ext_dim(self, s, t, u):
        dim = len(self.chains(s, t, u))
        if not dim:
            return 0
        return dim - self._rank(s, t, u) - self._rank(s - 1, t, u)

    def chart(self, smax, tmax):
        """{(s, t, u): dim} for s <= smax, t <= tmax; u runs over all weights."""
        out = {}
        for s in range(smax + 1):
            for t in range(s, tmax + 1):
                for u in range(0, t + 1):
                    d = self.ext_dim(s, t, u)
                    if d:
                        out[(s, t, u)] = d
        return out


@lru_cache(maxsize=None)
def _reduced_by_degree(oracle):
    table = {}
    for m in oracle.reduced:
        table.setdefault(oracle.degree(m), []).append(m)
    return table


def _chains(oracle, s, t, u):
    key = (s, t, u)
    cache = oracle.__dict__.setdefault("_chain_cache", {})
    r = cache.get(key)
    if r is not None:
        return r
    if s == 0:
        r = [()] if (t, u) == (0, 0) else []
    elif t < s:
        r = []
    else:
        r = []
        for (d, w), ms in _reduced_by_degree(oracle).items():
            if d > t or w > u:
                continue
            rest = _chains(oracle, s - 1, t - d, u - w)
            for m in ms:
                for tail in rest:
                    r.append((m,) + tail)
    cache[key] = r
    return r
