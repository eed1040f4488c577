"""Milnor bases of A(n) and of the bimodules C(n), B(n).

An operation is a left H-linear combination of Milnor symbols rho(E, R),
the functionals dual to the monomials tau^E xi^R.  Products and bimodule
actions are read off from the coproduct and coactions of the dual side:
the coefficient of rho(x) in rho(m1) * rho(m2) is the coefficient of
m1 (x) m2 in psi(x), up to the Koszul sign (-1)^{|m1||m2|}.

Coefficients do not commute with operations in the real profile.  Moving
one across uses (f * h)(x) = f(x * eta_R(h)).
"""

from __future__ import annotations

import re

from .coeff import HElement, Kind, Profile, format_h
from .dualalg import (ONE, An, Cn, Tag, algebra, coaction_map, coproduct_map,
                      mono_degree, unit_R)
from .linalg import Reducer


def _acc(out, k, c, p):
    s = (out.get(k, 0) + c) % p
    if s:
        out[k] = s
    else:
        out.pop(k, None)


def _parity(m):
    return bin(m[0]).count("1") & 1


class Pairing:
    """Inverted coaction table: (m1, m2) -> [(a, b, x, c)].

    ``cm`` maps each monomial x of the source algebra to a tensor; the
    product of the dual symbols rho(m1), rho(m2) collects the entries.
    """

    def __init__(self, src, cm):
        self.src = src
        self.cm = cm
        self.table = {}
        self.done = set()

    def ensure(self, d):
        if d in self.done:
            return
        self.done.add(d)
        for x in self.src.monomials_at(d):
            for (a, b, m1, m2), c in self.cm.mono(x).items():
                self.table.setdefault((m1, m2), []).append((a, b, x, c))

    def lookup(self, m1, m2, d1, d2):
        hi = d1 + d2
        lo = hi - bin(m1[0]).count("1") - bin(m2[0]).count("1")
        for d in range(lo, hi + 1):
            self.ensure(d)
        return self.table.get((m1, m2), ())


# ---------------------------------------------------------------------------

_ENVS = {}


def milnor_algebra(profile, tag):
    key = (profile, tag)
    env = _ENVS.get(key)
    if env is None:
        env = _ENVS[key] = MilnorAlgebra(profile, tag)
    return env


class MilnorAlgebra:
    """Products (for A(n)) or bimodule actions (for C(n), B(n))."""

    def __init__(self, profile: Profile, tag: Tag):
        if tag.kind not in ("A", "C", "B"):
            raise ValueError("Milnor elements live in A(n), C(n) or B(n)")
        self.profile = profile
        self.tag = tag
        self.p = profile.prime
        self.odd = self.p != 2
        self.dual = algebra(profile, tag)
        self.n = tag.n
        self._hmove = {}
        if tag.kind == "A":
            self.prod = Pairing(self.dual, coproduct_map(profile, tag)) if tag.n >= 0 else None
        else:
            self.left = Pairing(self.dual, coaction_map(profile, tag, "left"))
            rc = coaction_map(profile, tag, "right")
            self.right = Pairing(self.dual, rc) if rc is not None else None

    def degree(self, m):
        return self.dual.degree(m)

    # -- coefficients ----------------------------------------------------------
    def move_h(self, m, a, b):
        """rho(m) * (rho^a tau^b) as {(a', b', x): c} with coefficients on the left."""
        key = (m, a, b)
        r = self._hmove.get(key)
        if r is not None:
            return r
        prof = self.profile
        if not prof.allowed(a, b):
            r = {}
        elif prof.kind is not Kind.REAL or (a, b) == (0, 0) or b == 0:
            r = {(a, b, m): 1}
        else:
            r = {}
            dm, wm = self.degree(m)
            span = self.n + 3 + 2 * b + a
            lo = dm - span
            if self.tag.kind != "B":
                lo = max(lo, 0)
            for d in range(lo, dm + 1):
                for x in self.dual.monomials_at(d):
                    for (a2, b2, y), c in self.dual.mul_eta(x, a, b).items():
                        if y == m:
                            _acc(r, (a2, b2, x), c, self.p)
        self._hmove[key] = r
        return r

    def times_h(self, terms, h):
        """terms * h for an H-element h given as {(a, b): c}."""
        p, prof = self.p, self.profile
        out = {}
        for (a, b, m), c in terms.items():
            for (ha, hb), hc in h.items():
                for (a2, b2, x), c2 in self.move_h(m, ha, hb).items():
                    if prof.allowed(a + a2, b + b2):
                        _acc(out, (a + a2, b + b2, x), c * hc * c2, p)
        return out

    # -- products --------------------------------------------------------------
    def _pair(self, pairing, left_env, x, y):
        """Sum over terms: (h1 rho_m1) (h2 rho_m2) through the given pairing.

        left_env owns the first factor and moves h2 across it.
        """
        p, prof = self.p, self.profile
        out = {}
        for (a1, b1, m1), c1 in x.items():
            for (a2, b2, m2), c2 in y.items():
                moved = left_env.move_h(m1, a2, b2)
                d2 = mono_degree(self.p, m2)[0]
                for (a3, b3, k1), c3 in moved.items():
                    d1 = left_env.degree(k1)[0]
                    sign = -1 if (self.odd and _parity(k1) and _parity(m2)) else 1
                    for (a4, b4, z, c4) in pairing.lookup(k1, m2, d1, d2):
                        A, B = a1 + a3 + a4, b1 + b3 + b4
                        if prof.allowed(A, B):
                            _acc(out, (A, B, z), sign * c1 * c2 * c3 * c4, p)
        return out

    def mul(self, x, y):
        if self.tag.kind != "A":
            raise ValueError("milnor products need an A(n) tag")
        if self.n < 0:
            out = {}
            for (a, b, m), c in x.items():
                for (a2, b2, m2), c2 in y.items():
                    if self.profile.allowed(a + a2, b + b2):
                        _acc(out, (a + a2, b + b2, ONE), c * c2, self.p)
            return out
        return self._pair(self.prod, self, x, y)

    def act_left(self, a_terms, x_terms):
        """A(n) acting on the left of a C(n)/B(n) element."""
        aenv = milnor_algebra(self.profile, An(self.n))
        return self._pair(self.left, aenv, a_terms, x_terms)

    def act_right(self, x_terms, b_terms):
        """A(n-1) acting on the right of a C(n)/B(n) element."""
        if self.right is None:
            # A(-1) = H: right multiplication by coefficients only
            h = {}
            for (a, b, m), c in b_terms.items():
                if m != ONE:
                    raise ValueError("A(-1) only contains coefficients")
                h[(a, b)] = (h.get((a, b), 0) + c) % self.p
            return self.times_h(x_terms, h)
        return self._pair(self.right, self, x_terms, b_terms)


# ---------------------------------------------------------------------------
# public element type
# ---------------------------------------------------------------------------

class MilnorElement:
    """Left H-linear combination of Milnor symbols in A(n), C(n) or B(n)."""

    __slots__ = ("env", "terms")

    def __init__(self, env: MilnorAlgebra, terms=None):
        self.env = env
        self.terms = env.dual.clean(dict(terms or {}))

    @property
    def profile(self):
        return self.env.profile

    @property
    def tag(self):
        return self.env.tag

    @classmethod
    def symbol(cls, profile, tag, E=0, R=(), a=0, b=0, c=1):
        R = tuple(R)
        while R and R[-1] == 0:
            R = R[:-1]
        env = milnor_algebra(profile, tag)
        m = (E, R)
        if not env.dual.admissible(m):
            raise ValueError("%s is not a Milnor symbol of %s" % (format_symbol(m), tag))
        return cls(env, {(a, b, m): c})

    @classmethod
    def one(cls, profile, tag):
        return cls.symbol(profile, tag)

    def _same(self, other):
        if not isinstance(other, MilnorElement) or other.env is not self.env:
            raise ValueError("tag or profile mismatch")

    def __eq__(self, other):
        if not isinstance(other, MilnorElement):
            return NotImplemented
        return self.env is other.env and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        self._same(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return MilnorElement(self.env, t)

    def __neg__(self):
        return MilnorElement(self.env, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return MilnorElement(self.env, {k: c * other for k, c in self.terms.items()})
        if isinstance(other, HElement):
            return MilnorElement(self.env, self.env.times_h(self.terms, other.terms))
        return milnor_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        if isinstance(other, HElement):
            out = {}
            for (a, b), c in other.terms.items():
                for (a2, b2, m), c2 in self.terms.items():
                    k = (a + a2, b + b2, m)
                    out[k] = out.get(k, 0) + c * c2
            return MilnorElement(self.env, out)
        return NotImplemented

    def is_zero(self):
        return not self.terms

    def bidegree(self):
        """Cohomological bidegree of a homogeneous element, None for zero."""
        for (a, b, m) in self.terms:
            d, w = self.env.degree(m)
            return d + a, w + a + b
        return None

    def __str__(self):
        if not self.terms:
            return "0"
        env = self.env
        parts = []
        for (a, b, m), c in sorted(self.terms.items(),
                                   key=lambda kv: (env.degree(kv[0][2]), kv[0][2], kv[0][:2])):
            h = format_h({(a, b): c})
            s = format_symbol(m, env.p)
            parts.append(s if h == "1" else ("%s*%s" % (h, s)))
        return " + ".join(parts)

    def __repr__(self):
        return "MilnorElement(%s @ %s)" % (self, self.env.tag)


def format_symbol(m, p=2):
    E, R = m
    if E in (0, 1) and len(R) <= 1:
        r = R[0] if R else 0
        if p == 2 and r >= 0:
            return "Sq%d" % (2 * r + E)
        return ("bP%d" if E else "P%d") % r
    es = [i for i in range(E.bit_length()) if E >> i & 1]
    return "Q(%s)P(%s)" % (",".join(map(str, es)), ",".join(map(str, R)))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def milnor_mul(x: MilnorElement, y: MilnorElement) -> MilnorElement:
    if x.tag.kind != "A" or y.tag.kind != "A":
        raise ValueError("milnor_mul needs A(n) elements")
    if x.env is not y.env:
        raise ValueError("envelope mismatch: %s vs %s" % (x.tag, y.tag))
    return MilnorElement(x.env, x.env.mul(x.terms, y.terms))


def commutator_with_h(a: MilnorElement, h: HElement) -> MilnorElement:
    """[a, h] = a*h - h*a for a in {Q_0, P^1}."""
    gens = {(1, ()), (0, (1,))}
    if len(a.terms) != 1 or next(iter(a.terms))[2] not in gens:
        raise ValueError("commutator_with_h supports the generators Q_0 and P^1 only")
    return a * h - h * a


def act_bimodule(a, x: MilnorElement, b=None) -> MilnorElement:
    """a . x . b for a in A(n), x in C(n) or B(n), b in A(n-1)."""
    if x.tag.kind not in ("C", "B"):
        raise ValueError("act_bimodule expects a C(n) or B(n) element")
    n = x.tag.n
    env = x.env
    terms = x.terms
    if a is not None:
        if a.tag != An(n):
            raise ValueError("left factor must lie in A(%d)" % n)
        terms = env.act_left(a.terms, terms)
    if b is not None:
        if b.tag != An(n - 1):
            raise ValueError("right factor must lie in A(%d)" % (n - 1))
        terms = env.act_right(terms, b.terms)
    return MilnorElement(env, terms)


def b_to_c(x: MilnorElement) -> MilnorElement:
    if x.tag.kind != "B":
        raise ValueError("b_to_c expects a B(n) element")
    env = milnor_algebra(x.profile, Cn(x.tag.n))
    return MilnorElement(env, x.terms)


def project_ops(x: MilnorElement, n: int) -> MilnorElement:
    """Restrict a symbol expansion to a smaller A(n); symbols outside vanish."""
    return MilnorElement(milnor_algebra(x.profile, An(n)), x.terms)


def include(x: MilnorElement, n: int) -> MilnorElement:
    """The inclusion A(m) -> A(n), m <= n, on Milnor symbols."""
    if x.tag.kind != "A" or n < x.tag.n:
        raise ValueError("cannot include %s into A(%d)" % (x.tag, n))
    return MilnorElement(milnor_algebra(x.profile, An(n)), x.terms)


# -- bases and decompositions ----------------------------------------------------

def h_basis(profile, P, Q):
    """Coefficient monomials (a, b) of cohomological bidegree (P, Q)."""
    if profile.allowed(P, Q - P):
        return [(P, Q - P)]
    return []


def op_basis(env: MilnorAlgebra, P, Q):
    """F_l basis (a, b, m) of the cohomological bidegree (P, Q) part."""
    return _op_basis(env, P, Q)


def _op_basis(env, P, Q):
    out = []
    prof = env.profile
    k = P - 2 * Q
    # monomial (d, w) and coefficient (a, a+b): d + a = P, w + a + b = Q
    # d - 2w = |E| >= 0 gives a + 2b <= |E| - k
    emax = env.n + 1 if env.n >= 0 else 0
    for a in range(0, emax - k + 1 if emax - k >= 0 else 0):
        for b in range((emax - k - a) // 2 + 1):
            if not prof.allowed(a, b):
                continue
            for m in env.dual.monomials_at(P - a):
                if env.degree(m)[1] == Q - a - b:
                    out.append((a, b, m))
    return out


def _solve_in(env, P, Q, cands, target):
    """Express target (terms) as an F_l combination of candidate terms."""
    p = env.p
    basis = _op_basis(env, P, Q)
    index = {k: i for i, k in enumerate(basis)}
    red = Reducer(p)
    for t, (label, terms) in enumerate(cands):
        red.add({index[k]: c for k, c in terms.items()}, t)
    combo = red.solve({index[k]: c for k, c in target.items()})
    return combo, red.rank, len(basis)


def decompose_left_An(x: MilnorElement):
    """x = sum a_i . P^{r_i} with a_i in A(n) and l^n | r_i."""
    if x.tag.kind != "B":
        raise ValueError("decompose_left_An expects a B(n) element")
    env, n, p = x.env, x.tag.n, x.profile.prime
    aenv = milnor_algebra(x.profile, An(n))
    result = {}
    for P, Q, part in _homogeneous_parts(x):
        cands = []
        step = p ** n
        for a_key in _a_keys_for(aenv, env, P, Q, step):
            (a, b, am), r = a_key
            gen = {(0, 0, (0, unit_R(1, r) if r else ())): 1}
            cands.append((a_key, env.act_left({(a, b, am): 1}, gen)))
        combo, rank, dim = _solve_in(env, P, Q, cands, part)
        if combo is None:
            raise ArithmeticError("decomposition failed at %s" % ((P, Q),))
        for t, c in combo.items():
            (a, b, am), r = cands[t][0]
            result.setdefault(r, {})
            _acc(result[r], (a, b, am), c, p)
    return sorted(((MilnorElement(aenv, terms), r) for r, terms in result.items() if terms),
                  key=lambda t: t[1])


def _a_keys_for(aenv, env, P, Q, step):
    """Pairs (h rho_a, r) with h rho_a P^r in bidegree (P, Q), l^n | r."""
    p = env.p
    d1, w1 = 2 * p - 2, p - 1
    out = []
    from .hopf import top_degree
    top = top_degree(aenv.dual)
    prof = env.profile
    for am in aenv.dual.monomials_upto(top):
        da, wa = aenv.degree(am)
        for a in range(aenv.n + 2):
            for b in range(aenv.n + 2):
                if not prof.allowed(a, b):
                    continue
                rest_p = P - da - a
                if rest_p % d1:
                    continue
                r = rest_p // d1
                if r % step or wa + a + b + r * w1 != Q:
                    continue
                out.append(((a, b, am), r))
    return out


def _homogeneous_parts(x: MilnorElement):
    parts = {}
    for (a, b, m), c in x.terms.items():
        d, w = x.env.degree(m)
        parts.setdefault((d + a, w + a + b), {})[(a, b, m)] = c
    return [(P, Q, t) for (P, Q), t in sorted(parts.items())]


def decompose_right_An1(x: MilnorElement):
    """x = sum beta^e P^r . b_i with b_i in A(n-1)."""
    if x.tag.kind != "B" or x.tag.n < 1:
        raise ValueError("decompose_right_An1 expects a B(n) element with n >= 1")
    env, n, p = x.env, x.tag.n, x.profile.prime
    benv = milnor_algebra(x.profile, An(n - 1))
    prof = x.profile
    result = {}
    from .hopf import top_degree
    top = top_degree(benv.dual)
    bmonos = benv.dual.monomials_upto(top)
    for P, Q, part in _homogeneous_parts(x):
        cands = []
        for bm in bmonos:
            db, wb = benv.degree(bm)
            for a in range(n + 2):
                for b in range(n + 2):
                    if not prof.allowed(a, b):
                        continue
                    for e in (0, 1):
                        rest = P - db - a - e
                        if rest % (2 * p - 2):
                            continue
                        r = rest // (2 * p - 2)
                        if wb + a + b + r * (p - 1) != Q:
                            continue
                        gen = {(0, 0, (e, (r,) if r else ())): 1}
                        img = env.act_right(gen, {(a, b, bm): 1})
                        cands.append((((e, r), (a, b, bm)), img))
        combo, rank, dim = _solve_in(env, P, Q, cands, part)
        if combo is None:
            raise ArithmeticError("decomposition failed at %s" % ((P, Q),))
        for t, c in combo.items():
            er, bkey = cands[t][0]
            result.setdefault(er, {})
            _acc(result[er], bkey, c, p)
    return sorted(((er, MilnorElement(benv, terms)) for er, terms in result.items() if terms),
                  key=lambda t: (t[0][1], t[0][0]))


# ---------------------------------------------------------------------------
# named operations and parsing
# ---------------------------------------------------------------------------

def sq(profile, k, n):
    """Sq^k in A(n) (prime 2): Sq^{2r} = P^r, Sq^{2r+1} = beta P^r."""
    if profile.prime != 2:
        raise ValueError("Sq needs prime 2")
    return MilnorElement.symbol(profile, An(n), E=k & 1, R=(k >> 1,) if k >> 1 else ())


def steenrod_p(profile, r, n, beta=False, tag=None):
    """beta^e P^r as a Milnor symbol in A(n) (or in tag, for negative r)."""
    tag = tag or An(n)
    return MilnorElement.symbol(profile, tag, E=1 if beta else 0, R=(r,) if r else ())


def q_op(profile, i, n):
    return MilnorElement.symbol(profile, An(n), E=1 << i)


def p_op(profile, R, n):
    return MilnorElement.symbol(profile, An(n), R=tuple(R))


def envelope_for(profile, E, R):
    """Smallest n with tau^E xi^R admissible in A(n)."""
    n = 0
    while not algebra(profile, An(n)).admissible((E, tuple(R))):
        n += 1
        if n > 12:
            raise ValueError("operation too large")
    return n


_OP_RE = re.compile(r"^(Sq|bP|P|Q)(-?\d+)$|^P\(([-\d,\s]+)\)$")


def parse_op(text: str, profile: Profile, n=None, tag=None) -> MilnorElement:
    """Parse ``Sq3``, ``bP2``, ``P-4``, ``Q1`` or ``P(1,0)``.

    Without an explicit envelope the smallest A(n) containing the symbol
    is used; negative powers need a B(n) tag.
    """
    t = text.strip()
    mt = _OP_RE.match(t)
    if not mt:
        raise ValueError("bad operation %r" % text)
    if mt.group(3) is not None:
        E, R = 0, tuple(int(v) for v in mt.group(3).split(","))
    else:
        kind, k = mt.group(1), int(mt.group(2))
        if kind == "Sq":
            if profile.prime != 2:
                raise ValueError("Sq needs prime 2")
            E, r = k & 1, k >> 1
            R = (r,)
        elif kind == "bP":
            E, R = 1, (k,)
        elif kind == "P":
            E, R = 0, (k,)
        else:
            E, R = 1 << k, ()
    R = list(R)
    while R and R[-1] == 0:
        R.pop()
    R = tuple(R)
    if tag is None:
        if R and R[0] < 0:
            raise ValueError("negative powers need a B(n) tag")
        tag = An(n if n is not None else envelope_for(profile, E, R))
    return MilnorElement.symbol(profile, tag, E=E, R=R)
