import pytest

from msing.amod import (ModuleMap, Tower, bmu_band, identity_map, jstar_map, lens_module,
                        lens_tower, suspend, tower_colim, trivial_module, zero_map)
from msing.cobar import CobarOracle
from msing.ext import (ChainMap, Resolution, Window, chart_of, ext_dims, ext_equiv_check,
                       ext_iso_at, induced_ext_map, lin_check, parse_window, residue_map,
                       stabilize_over_n, total_complex_e2)

from conftest import ALL_PROFILES, COMPLEX, REAL, TRIVIAL2, TRIVIAL3


def test_parse_window():
    W = parse_window("s=0..4,ts=-2..8")
    assert (W.smax, W.ts_lo, W.ts_hi, W.tmax) == (4, -2, 8, 12)
    assert parse_window("s=0..1,ts=0..2,u=-1..3").describe()["u"] == [-1, 3]


@pytest.mark.parametrize("module", ["trivial", "lens", "band"])
def test_resolution_invariants(profile, module):
    n = 1
    M = {"trivial": trivial_module(profile, n), "lens": lens_module(profile, 1, 3, n),
         "band": suspend(bmu_band(profile, -3, 3, n), 1, 0)}[module]
    R = Resolution(M, n, Window(3, -3, 4))
    assert R.d_squared_failures() == []
    assert R.exactness_failures() == []
    if profile.kind.value == "trivial":
        assert R.is_minimal()


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_ext_matches_the_cobar_oracle(p, n):
    tmax = 8 if n < 2 else 6
    W = Window(3, -3, tmax)
    mine = {k: v for k, v in ext_dims(trivial_module(TRIVIAL2 if p == 2 else TRIVIAL3, n), n, W)
            .entries.items() if k[1] <= tmax}
    assert mine == CobarOracle(p, n).chart(3, tmax)


def test_ext_over_a1_at_two():
    # frozen from the cobar oracle
    chart = ext_dims(trivial_module(TRIVIAL2, 1), 1, Window(4, 0, 8))
    want = {(0, 0, 0), (1, 1, 0), (1, 2, 1), (2, 2, 0), (2, 4, 2), (2, 6, 2), (3, 3, 0),
            (3, 6, 3), (3, 7, 2), (3, 8, 3), (4, 4, 0), (4, 8, 2), (4, 8, 4), (4, 10, 4),
            (4, 12, 4)}
    assert set(chart.entries) == want and set(chart.entries.values()) == {1}


def test_coefficient_towers_over_a0():
    # complex: Ext = F_2[tau, h_0], tau lowering u by one
    chart = ext_dims(trivial_module(COMPLEX, 0), 0, Window(3, 0, 3))
    assert chart.entries == {(s, s, -b): 1 for s in range(4) for b in range(4)}
    # real: beta(tau) = rho leaves F_2[tau^2] above s = 0
    chart = ext_dims(trivial_module(REAL, 0), 0, Window(2, 0, 2))
    assert chart.entries == {(s, s, u): 1 for s in range(3) for u in (0, -2)}


def test_stabilization_over_the_envelope():
    chart, n = stabilize_over_n(lambda n: trivial_module(TRIVIAL2, n), Window(2, 0, 2), 0, 4)
    assert n == 1
    assert chart.entries == CobarOracle(2, 1).chart(2, 4)
    assert chart.entries == {(0, 0, 0): 1, (1, 1, 0): 1, (1, 2, 1): 1, (2, 2, 0): 1, (2, 4, 2): 1}


def test_chart_json_is_deterministic():
    a = ext_dims(trivial_module(TRIVIAL3, 1), 1, Window(2, 0, 6)).to_json()
    b = ext_dims(trivial_module(TRIVIAL3, 1), 1, Window(2, 0, 6)).to_json()
    assert a == b
    assert '"entries"' in a and '"envelope": 1' in a


# -- induced maps ----------------------------------------------------------------------

W_SMALL = Window(2, -4, 3)


def _compose(f, g):
    return ModuleMap(f.src, g.tgt, {i: g.apply_terms(img) for i, img in f.images.items()})


def _matmul(p, rows_g, rows_f):
    out = []
    for row in rows_g:
        acc = {}
        for i, c in row.items():
            for j, c2 in rows_f[i].items():
                acc[j] = (acc.get(j, 0) + c * c2) % p
        out.append({j: c for j, c in acc.items() if c})
    return out


@pytest.mark.parametrize("prof", [TRIVIAL2, TRIVIAL3, COMPLEX], ids=str)
def test_ext_is_a_contravariant_functor(prof):
    n = 1
    L1 = lens_module(prof, 1, 3, n)
    f = jstar_map(L1)
    g = jstar_map(f.tgt)
    RM, RN, RK = (Resolution(X, n, W_SMALL) for X in (L1, f.tgt, g.tgt))
    cf, cg, cgf = ChainMap(f, RM, RN), ChainMap(g, RN, RK), ChainMap(_compose(f, g), RM, RK)
    for c in (cf, cg, cgf):
        assert c.commutes() == []
    mf, mg, mgf = (induced_ext_map(c, W_SMALL) for c in (cf, cg, cgf))
    for key, (rows, dk, dm) in mgf.items():
        rows_g = mg.get(key, ([{}] * dk, dk, 0))[0]
        rows_f = mf.get(key, ([], 0, dm))[0]
        assert _matmul(prof.prime, rows_g, rows_f) == rows


def test_identity_induces_the_identity(profile):
    n = 1
    M = lens_module(profile, 1, 3, n)
    R = Resolution(M, n, W_SMALL)
    mats = induced_ext_map(ChainMap(identity_map(M), R, R), W_SMALL)
    assert mats
    for rows, dn, dm in mats.values():
        assert dn == dm and rows == [{j: 1} for j in range(dn)]
    assert ext_iso_at(identity_map(M), n, W_SMALL).status == "ISO"


def test_different_lifts_induce_the_same_map():
    n = 1
    f = jstar_map(lens_module(TRIVIAL2, 1, 3, n))
    RM, RN = Resolution(f.src, n, W_SMALL), Resolution(f.tgt, n, W_SMALL)
    a, b = ChainMap(f, RM, RN), ChainMap(f, RM, RN, variant=2)
    assert a.commutes() == [] and b.commutes() == []
    assert induced_ext_map(a, W_SMALL) == induced_ext_map(b, W_SMALL)


def test_zero_map_fails_at_the_unit():
    W = Window(1, 0, 2)
    v = lin_check(TRIVIAL2, W, nmax=3, widths=[4, 6, 8], zero_map=True)
    assert v.status == "FAIL" and v.where == (0, 0, 0)
    assert v.witness["previous_envelope"] == v.witness["envelope"] - 1


def test_narrow_band_is_inconclusive():
    v = lin_check(TRIVIAL2, Window(2, 0, 3), nmax=3, widths=[2, 3])
    assert v.status == "INCONCLUSIVE" and v.witness["axis"] == "band"


def test_residue_is_an_ext_iso_on_a_small_window():
    v = lin_check(TRIVIAL2, Window(1, 0, 2), nmax=3, widths=[4, 5, 6, 7, 8])
    assert v.status == "ISO"
    assert v.witness["envelope"] <= 3


def test_residue_map_is_linear(profile):
    f = residue_map(profile, 6, 2)
    assert f.linearity_failures() == []


def test_equiv_check_without_family_is_the_plain_check():
    M = lens_module(TRIVIAL3, 1, 3, 1)
    assert ext_equiv_check(identity_map(M), W_SMALL).status == "ISO"
    Z = zero_map(M, M)
    assert ext_equiv_check(Z, W_SMALL).status == "FAIL"


# -- towers ----------------------------------------------------------------------------

def test_total_complex_of_the_lens_tower(profile):
    n = 1
    T = lens_tower(profile, 0, 3, 6, n)
    W = Window(2, -3, 3)
    chart, TC = total_complex_e2(T, n, W)
    assert TC.d_squared_failures() == []
    assert chart == ext_dims(tower_colim(T), n, W)


def test_real_charts_need_headroom_above_the_window():
    # rho^(p - t) lets generators above the window's top degree contribute
    M = lens_module(REAL, 3, 9, 1)
    W = Window(2, -3, 3)
    short = chart_of(Resolution(M, 1, W, 0), W)
    full = ext_dims(M, 1, W)
    assert short != full
    assert full == chart_of(Resolution(M, 1, W, 16), W)


def test_constant_tower_gives_the_level():
    n = 1
    L = lens_module(TRIVIAL2, 1, 3, n)
    W = Window(2, -3, 3)
    chart, _ = total_complex_e2(Tower([L, L, L], [identity_map(L)] * 2), n, W)
    assert chart == ext_dims(L, n, W)


def test_zero_map_tower_gives_the_last_level():
    n = 1
    A = lens_module(TRIVIAL3, 0, 2, n)
    B = lens_module(TRIVIAL3, 1, 3, n)
    W = Window(2, -3, 3)
    chart, _ = total_complex_e2(Tower([A, B], [zero_map(A, B)]), n, W)
    assert chart == ext_dims(B, n, W)


@pytest.mark.parametrize("prof,top,env,width", [(TRIVIAL2, 24, 3, 20), (TRIVIAL3, 36, 2, 32),
                                                (COMPLEX, 24, 3, 20)])
def test_headline_iso_at_wider_bands(prof, top, env, width):
    # the residue map is an Ext-iso once the band is wide enough to clear
    # the truncation edge; the acceptance caps stop short of this width
    v = lin_check(prof, Window(3, 0, 6), nmax=3, widths=list(range(4, top + 1, 2)))
    assert v.status == "ISO"
    assert (v.witness["envelope"], v.witness["band_half_width"]) == (env, width)
