import pytest

from msing.dualalg import FULL, An, Bn, Cn
from msing.hopf import (bn_left_iso, bn_right_iso, cn_left_iso, coactions_commute, hopf_axioms,
                        right_basis_roundtrip, xi_power_sequence, xn_iso)

from conftest import ALL_PROFILES

DEG = 10


@pytest.mark.parametrize("tag", [FULL, An(1), An(2)], ids=str)
def test_hopf_algebroid_axioms(profile, tag):
    assert hopf_axioms(profile, DEG, tag) == []


@pytest.mark.parametrize("tag", [FULL, An(2), Cn(2)], ids=str)
def test_right_basis_round_trip(profile, tag):
    assert right_basis_roundtrip(profile, tag, DEG) == []


def test_right_basis_round_trip_localized(profile):
    assert right_basis_roundtrip(profile, Bn(2), DEG, -DEG) == []


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("check", [xn_iso, cn_left_iso, bn_left_iso, xi_power_sequence],
                         ids=lambda f: f.__name__)
def test_comodule_isomorphisms(profile, n, check):
    assert check(profile, n, DEG, 3) == []


def test_localized_right_coaction(profile):
    assert bn_right_iso(profile, 2, DEG, 3) == []


@pytest.mark.parametrize("n", [1, 2])
def test_left_and_right_coactions_commute(profile, n):
    assert coactions_commute(profile, n, DEG) == []
