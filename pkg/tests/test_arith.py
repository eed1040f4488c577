from math import comb

from hypothesis import given, strategies as st

from msing.arith import binom_mod, binom_periodic, inv_mod, is_prime

primes = st.sampled_from([2, 3, 5, 7])


@given(st.integers(0, 300), st.integers(0, 300), primes)
def test_lucas_matches_direct_binomial(a, b, p):
    assert binom_mod(a, b, p) == comb(a, b) % p


@given(st.integers(1, 1000), primes)
def test_inverse(a, p):
    if a % p:
        assert a * inv_mod(a, p) % p == 1


def test_primality():
    assert [k for k in range(20) if is_prime(k)] == [2, 3, 5, 7, 11, 13, 17, 19]


@given(st.integers(-60, 60), st.integers(0, 20), primes)
def test_negative_upper_entries_follow_the_generalized_binomial(a, b, p):
    # binom(a, b) = a (a-1) ... (a-b+1) / b! makes sense for every integer a
    num = 1
    for j in range(b):
        num *= a - j
    expected = (num // _fact(b)) % p
    assert binom_periodic(a, b, p) % p == expected
    assert binom_mod(a, b, p) % p == expected


def _fact(b):
    out = 1
    for j in range(2, b + 1):
        out *= j
    return out
