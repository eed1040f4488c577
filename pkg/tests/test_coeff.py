import pytest
from hypothesis import given, strategies as st

from msing.coeff import HElement, Kind, Profile, format_h, h_beta, h_dim

from conftest import ALL_PROFILES, COMPLEX, REAL, TRIVIAL2, TRIVIAL3


def test_profile_constraints():
    with pytest.raises(ValueError):
        Profile(3, Kind.COMPLEX)
    with pytest.raises(ValueError):
        Profile(3, "real")
    with pytest.raises(ValueError):
        Profile(4)
    assert Profile(2, "complex") == COMPLEX


def test_coefficient_dimensions():
    # H is F_l[tau, rho] with tau in (0, 1) and rho in (1, 1), cut down by the profile
    assert [h_dim(TRIVIAL2, p, q) for p, q in [(0, 0), (0, 1), (1, 1)]] == [1, 0, 0]
    assert [h_dim(COMPLEX, p, q) for p, q in [(0, 0), (0, 3), (1, 1)]] == [1, 1, 0]
    assert [h_dim(REAL, p, q) for p, q in [(0, 3), (2, 3), (3, 3), (4, 3), (1, 0)]] == [1, 1, 1, 0, 0]
    assert h_dim(TRIVIAL3, 0, 0) == 1


monos = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(1, 6))


@given(st.sampled_from(ALL_PROFILES), monos, monos, monos)
def test_ring_axioms(prof, x, y, z):
    X, Y, Z = (HElement.mono(prof, *m) for m in (x, y, z))
    assert (X * Y) * Z == X * (Y * Z)
    assert X * Y == Y * X
    assert X * HElement.one(prof) == X


@given(monos, monos)
def test_bockstein_is_a_derivation_squaring_to_zero(x, y):
    X, Y = HElement.mono(REAL, *x), HElement.mono(REAL, *y)
    assert h_beta(X * Y) == h_beta(X) * Y + X * h_beta(Y)
    assert h_beta(h_beta(X)).is_zero()


def test_bockstein_values():
    tau = HElement.mono(REAL, 0, 1)
    rho = HElement.mono(REAL, 1, 0)
    assert h_beta(tau) == rho
    assert h_beta(tau * tau).is_zero()
    assert h_beta(HElement.mono(COMPLEX, 0, 1)).is_zero()


def test_mixed_bidegrees_rejected():
    with pytest.raises(ValueError):
        HElement(REAL, {(0, 1): 1, (0, 2): 1})


def test_format():
    assert format_h({(2, 1): 1}) != "0"
    assert format_h({}) == "0"
