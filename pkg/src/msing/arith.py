"""Modular arithmetic helpers: inverses and binomial coefficients mod a prime."""

from __future__ import annotations

from functools import lru_cache
from math import comb


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod %d" % p)
    return pow(a, p - 2, p)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _lucas(a: int, b: int, p: int) -> int:
    """Lucas' theorem for 0 <= b and 0 <= a."""
    r = 1
    while a or b:
        ai, bi = a % p, b % p
        if bi > ai:
            return 0
        r = r * comb(ai, bi) % p
        a //= p
        b //= p
    return r


@lru_cache(maxsize=None)
def binom_mod(a: int, b: int, p: int) -> int:
    """Binomial coefficient C(a, b) mod p for any integer a and b >= 0.

    Negative tops use the falling-factorial polynomial
    a(a-1)...(a-b+1)/b!, i.e. C(a, b) = (-1)^b C(b-a-1, b).
    Returns 0 for b < 0.
    """
    if b < 0:
        return 0
    if a >= 0:
        return _lucas(a, b, p)
    sign = -1 if b % 2 else 1
    return sign * _lucas(b - a - 1, b, p) % p


def binom_periodic(a: int, b: int, p: int) -> int:
    """C(a, b) mod p computed from a mod p^N with p^N > b.

    The falling factorial is p^N-periodic in a modulo p once p^N > b, so
    this is an independent route to the same value as binom_mod.
    """
    if b < 0:
        return 0
    q = 1
    while q <= b:
        q *= p
    return _lucas(a % q, b, p)
