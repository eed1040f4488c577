import pytest
from hypothesis import given, strategies as st

from msing.cobar import CobarOracle


@given(st.sampled_from([2, 3]), st.integers(0, 2), st.integers(1, 3), st.integers(0, 14),
       st.integers(0, 8))
def test_cobar_differential_squares_to_zero(p, n, s, t, u):
    assert CobarOracle(p, n).d_squared_failures(s, t, u) == []


def test_hopf_algebra_size():
    # the dual of A(1) is E(tau_0, tau_1) (x) F_l[xi_1]/(xi_1^l)
    assert len(CobarOracle(2, 1).monos) == 2 * 2 * 2
    assert len(CobarOracle(3, 1).monos) == 2 * 2 * 3
    # and the dual of A(2) truncates xi_1 at l^2 and xi_2 at l
    assert len(CobarOracle(2, 2).monos) == 8 * 4 * 2


def test_coproduct_of_xi_and_tau():
    o = CobarOracle(2, 1)
    one = (0, (0,))
    xi1 = (0, (1,))
    tau1 = (2, (0,))
    tau0 = (1, (0,))
    assert o.psi((0, (1,))) == {(xi1, one): 1, (one, xi1): 1}
    assert o.psi(tau1) == {(tau1, one): 1, (xi1, tau0): 1, (one, tau1): 1}


@pytest.mark.parametrize("p", [2, 3])
def test_ext_over_a0_is_a_polynomial_tower(p):
    # Ext over the exterior algebra on the Bockstein: one class h_0^s in (s, s, 0)
    chart = CobarOracle(p, 0).chart(5, 10)
    assert chart == {(s, s, 0): 1 for s in range(6)}
