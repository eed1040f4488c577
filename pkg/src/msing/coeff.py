"""Coefficient rings F_l[rho, tau] in three profiles.

An element is a sum of monomials c * rho^a tau^b.  Its cohomological
bidegree is (a, a+b); the homological bidegree is the negative of that.
Profiles decide which monomials survive:

* TRIVIAL: only the unit, so rho = tau = 0.
* COMPLEX: powers of tau only (prime 2).
* REAL: all rho^a tau^b (prime 2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .arith import is_prime


class Kind(enum.Enum):
    TRIVIAL = "trivial"
    COMPLEX = "complex"
    REAL = "real"


@dataclass(frozen=True)
class Profile:
    prime: int
    kind: Kind = Kind.TRIVIAL
    dim_d: int = 0

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", Kind(self.kind.lower()))
        if not is_prime(self.prime):
            raise ValueError("prime must be a prime number, got %r" % self.prime)
        if self.kind is not Kind.TRIVIAL and self.prime != 2:
            raise ValueError("profile %s requires prime 2" % self.kind.value)
        if self.dim_d < 0:
            raise ValueError("dim_d must be nonnegative")

    @property
    def has_tau(self) -> bool:
        return self.kind is not Kind.TRIVIAL

    @property
    def has_rho(self) -> bool:
        return self.kind is Kind.REAL

    def allowed(self, a: int, b: int) -> bool:
        """Is rho^a tau^b a nonzero monomial in this profile?"""
        if a < 0 or b < 0:
            return False
        if self.kind is Kind.TRIVIAL:
            return a == 0 and b == 0
        if self.kind is Kind.COMPLEX:
            return a == 0
        return True

    def h_dim(self, p: int, q: int) -> int:
        """F_l-dimension of the cohomological bidegree (p, q) part."""
        return 1 if self.allowed(p, q - p) else 0

    def __str__(self):
        return "%s/%d" % (self.kind.value, self.prime)


def h_dim(profile: Profile, p: int, q: int) -> int:
    return profile.h_dim(p, q)


class HElement:
    """Homogeneous element of the coefficient ring.

    ``terms`` maps (a, b) to a coefficient.  Monomials that the profile
    kills are dropped; mixing bidegrees raises ValueError.
    """

    __slots__ = ("profile", "terms")

    def __init__(self, profile: Profile, terms=None):
        self.profile = profile
        p = profile.prime
        clean = {}
        for (a, b), c in dict(terms or {}).items():
            c %= p
            if c and profile.allowed(a, b):
                clean[(a, b)] = (clean.get((a, b), 0) + c) % p
        clean = {k: v for k, v in clean.items() if v}
        if len({(a, a + b) for (a, b) in clean}) > 1:
            raise ValueError("non-homogeneous coefficient element: %r" % clean)
        self.terms = clean

    @classmethod
    def mono(cls, profile, a=0, b=0, c=1):
        return cls(profile, {(a, b): c})

    @classmethod
    def one(cls, profile):
        return cls(profile, {(0, 0): 1})

    @classmethod
    def zero(cls, profile):
        return cls(profile, {})

    def is_zero(self) -> bool:
        return not self.terms

    def bidegree(self):
        """Cohomological bidegree, or None for zero."""
        for a, b in self.terms:
            return (a, a + b)
        return None

    def item(self):
        """The single (a, b, c) of a nonzero element, else None."""
        for (a, b), c in self.terms.items():
            return a, b, c
        return None

    def __eq__(self, other):
        if isinstance(other, int):
            other = HElement(self.profile, {(0, 0): other})
        return (isinstance(other, HElement) and self.profile == other.profile
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.profile, tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        _check(self, other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return HElement(self.profile, t)

    def __neg__(self):
        return HElement(self.profile, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return HElement(self.profile, {k: c * other for k, c in self.terms.items()})
        if isinstance(other, HElement):
            return h_mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __repr__(self):
        return "HElement(%s)" % format_h(self.terms)


def _check(x, y):
    if not isinstance(y, HElement) or x.profile != y.profile:
        raise ValueError("coefficient profile mismatch")


def h_mul(x: HElement, y: HElement) -> HElement:
    _check(x, y)
    t = {}
    for (a, b), c in x.terms.items():
        for (a2, b2), c2 in y.terms.items():
            k = (a + a2, b + b2)
            t[k] = t.get(k, 0) + c * c2
    return HElement(x.profile, t)


def beta_mono(profile: Profile, a: int, b: int):
    """Bockstein of rho^a tau^b as (a', b', c), or None when it vanishes.

    beta is the derivation with beta(tau) = rho and beta(rho) = 0.  It is
    forced by applying beta to u^2 = tau v + rho u with beta(u) = v.
    """
    if profile.kind is not Kind.REAL or b == 0:
        return None
    c = b % profile.prime
    if c == 0:
        return None
    return a + 1, b - 1, c


def h_beta(x: HElement) -> HElement:
    t = {}
    for (a, b), c in x.terms.items():
        r = beta_mono(x.profile, a, b)
        if r is not None:
            t[(r[0], r[1])] = t.get((r[0], r[1]), 0) + c * r[2]
    return HElement(x.profile, t)


def format_h(terms) -> str:
    """Render a {(a, b): c} dict as text such as 'r^2*T + T^3'."""
    if not terms:
        return "0"
    parts = []
    for (a, b), c in sorted(terms.items()):
        f = []
        if a:
            f.append("r" if a == 1 else "r^%d" % a)
        if b:
            f.append("T" if b == 1 else "T^%d" % b)
        s = "*".join(f) or "1"
        if c != 1:
            s = "%d*%s" % (c, s) if f else str(c)
        parts.append(s)
    return " + ".join(parts)
