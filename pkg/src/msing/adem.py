"""Motivic Adem relations at the prime 2, used as an independent check on
the Milnor product.

For 0 < a < 2b the relation rewrites Sq^a Sq^b as a sum of coefficient
multiples of Sq^i Sq^j.  Even a comes straight from the displayed sums
(with a tau for odd j when b is even, and extra rho terms when b is odd).
Odd a is reduced with Sq^a = Sq^1 Sq^(a-1), the commutation rule
[Sq^1, h] = beta(h) and Sq^1 Sq^c = Sq^(c+1) for c even, 0 for c odd.
"""

from __future__ import annotations

from .arith import binom_mod
from .coeff import Kind, Profile, beta_mono
from .ops import milnor_algebra, sq
from .dualalg import An


def adem_rhs(profile: Profile, a: int, b: int):
    """Right-hand side of Sq^a Sq^b as {(rho_exp, tau_exp, i, j): coeff}."""
    if profile.prime != 2:
        raise ValueError("the Adem oracle covers the prime 2")
    if not 0 < a < 2 * b:
        raise ValueError("need 0 < a < 2b")
    if a % 2 == 0:
        return _even(profile, a, b)
    if a == 1:
        return {(0, 0, b + 1, 0): 1} if b % 2 == 0 else {}
    out = {}
    for (x, y, i, j), c in _even(profile, a - 1, b).items():
        # Sq^1 (h Sq^i Sq^j) = beta(h) Sq^i Sq^j + h Sq^1 Sq^i Sq^j
        bh = beta_mono(profile, x, y)
        if bh is not None:
            _add(out, (bh[0], bh[1], i, j), c * bh[2])
        if i % 2 == 0:
            _add(out, (x, y, i + 1, j), c)
    return out


def _even(profile, a, b):
    out = {}
    for j in range(a // 2 + 1):
        c = binom_mod(b - 1 - j, a - 2 * j, 2)
        if not c:
            continue
        if b % 2 == 0:
            t = j % 2
            if profile.allowed(0, t):
                _add(out, (0, t, a + b - j, j), c)
        else:
            _add(out, (0, 0, a + b - j, j), c)
            if j % 2 == 1 and profile.allowed(1, 0):
                _add(out, (1, 0, a + b - j - 1, j), c)
    return out


def _add(d, k, c):
    s = (d.get(k, 0) + c) % 2
    if s:
        d[k] = s
    else:
        d.pop(k, None)


def envelope_for_sq(k):
    """Smallest n with Sq^k in A(n)."""
    n = 0
    while (k >> 1) >= 2 ** n:
        n += 1
    return n


def check_adem(profile: Profile, max_sum=20):
    """Compare milnor products with the oracle for 0 < a < 2b, a + b <= max_sum.

    Both sides are evaluated in one A(N) large enough to hold every term;
    the left side is also computed in the smallest envelope of Sq^a, Sq^b
    and compared after inclusion.
    """
    N = envelope_for_sq(max_sum)
    env = milnor_algebra(profile, An(N))
    fails = []
    for total in range(2, max_sum + 1):
        for a in range(1, total):
            b = total - a
            if not a < 2 * b:
                continue
            lhs = env.mul(sq(profile, a, N).terms, sq(profile, b, N).terms)
            n0 = max(envelope_for_sq(a), envelope_for_sq(b))
            small = milnor_algebra(profile, An(n0))
            lhs_small = small.mul(sq(profile, a, n0).terms, sq(profile, b, n0).terms)
            if lhs_small != lhs:
                fails.append("Sq%d Sq%d differs between A(%d) and A(%d)" % (a, b, n0, N))
            rhs = {}
            for (x, y, i, j), c in adem_rhs(profile, a, b).items():
                prod = env.mul({(x, y, (i & 1, (i >> 1,) if i >> 1 else ())): c},
                               {(0, 0, (j & 1, (j >> 1,) if j >> 1 else ())): 1})
                for k, v in prod.items():
                    _add(rhs, k, v)
            if rhs != lhs:
                fails.append("Adem relation fails for Sq%d Sq%d" % (a, b))
    return fails
