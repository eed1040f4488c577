import pytest
from hypothesis import given, strategies as st

from msing.amod import (ModuleElement, Tower, algebra_generators, band_product, bmu_band,
                        bsigma_band, frobenius_adjoint, frobenius_formula, identity_map,
                        jstar, jstar_map, label_map, lens_module, lens_tower, parse_module,
                        pi_map, pi_projection, psigma_inclusion, psigma_map, relation_failures,
                        residue, rule_failures, suspend, tower_colim, trivial_module, zero_map)
from msing.coeff import HElement
from msing.ops import parse_op, sq, steenrod_p

from conftest import ALL_PROFILES, COMPLEX, REAL, TRIVIAL2, TRIVIAL3


def _mods(prof):
    return [trivial_module(prof, 2), bmu_band(prof, -4, 4, 2), bsigma_band(prof, -4, 4, 2),
            lens_module(prof, 2, 6, 2), suspend(bmu_band(prof, -3, 3, 2), 1, 0),
            suspend(bsigma_band(prof, -2, 2, 2), 1, 0)]


@pytest.mark.parametrize("which", range(6))
def test_actions_respect_the_relations_of_a2(profile, which):
    M = _mods(profile)[which]
    assert relation_failures(M, 2) == []
    assert rule_failures(M, 2) == []


# -- closed-form actions ------------------------------------------------------------

def _act(M, op_text, label, n=2):
    op = parse_op(op_text, M.profile, n=n)
    return M.act(op, M.gen(label))


def test_named_actions_on_the_band():
    M = bmu_band(TRIVIAL3, -3, 6, 2)
    assert _act(M, "Q0", (1, 0)) == M.gen((0, 1))            # beta(u) = v
    assert _act(M, "P1", (0, 1)) == M.gen((0, 3))            # P^1(v) = v^l
    assert _act(M, "P1", (1, 0)) == 0                        # P^r(u) = 0 for r > 0
    assert _act(M, "Q0", (1, 2)) == M.gen((0, 3))            # beta(u v^k) = v^(k+1)
    H = trivial_module(TRIVIAL3, 2)
    assert _act(H, "P1", "1") == 0 and _act(H, "Q0", "1") == 0


def test_named_actions_on_lens_and_bsigma():
    L = lens_module(TRIVIAL2, 1, 3, 2)
    assert [bd for _, bd in lens_module(TRIVIAL2, 0, 2).gens] == [(0, 0), (1, 1), (2, 1), (3, 2)]
    assert _act(L, "Sq2", (0, -1)) == L.gen((0, 0))          # binom(-1, 1) = 1 mod 2
    S = bsigma_band(TRIVIAL3, -2, 4, 2)
    assert _act(S, "P1", (0, 1)) == S.gen((0, 2))            # -binom(2, 1) = 1 mod 3
    assert _act(S, "Q0", (0, 2)) == 0


def test_band_truncation_drops_out_of_band_classes():
    M = bmu_band(TRIVIAL3, 0, 2, 2)
    assert _act(M, "P1", (0, 1)) == 0                        # v^3 is outside the band


# -- Cartan formula ---------------------------------------------------------------------

def _mul(prof, x, y):
    """Product of module elements of a bmu band, using the ring structure."""
    M = x.module
    out = {}
    for (a, b, i), c in x.terms.items():
        for (a2, b2, j), c2 in y.terms.items():
            for (a3, b3, lab), c3 in band_product(prof, "bmu", M.label(i), M.label(j)).items():
                k = (a + a2 + a3, b + b2 + b3, M.index[lab])
                out[k] = out.get(k, 0) + c * c2 * c3
    return ModuleElement(M, out)


def _op(M, e, r, x):
    prof = M.profile
    if (e, r) == (0, 0):
        return x
    return M.act(steenrod_p(prof, r, 2, beta=bool(e)), x)


labels = st.tuples(st.integers(0, 1), st.integers(-4, 4))


@given(st.sampled_from(ALL_PROFILES), labels, labels, st.data())
def test_cartan_formula_on_bmu(prof, lx, ly, data):
    p = prof.prime
    M = bmu_band(prof, -30, 30, 2)
    x, y = M.gen(lx), M.gen(ly)
    xy = _mul(prof, x, y)
    r = data.draw(st.integers(0, p * p - 1))
    lhs = _op(M, 0, r, xy)
    rhs = ModuleElement(M, {})
    for i in range(r + 1):
        rhs = rhs + _mul(prof, _op(M, 0, i, x), _op(M, 0, r - i, y))
    if p == 2:
        # the motivic Cartan formula at 2 adds tau times the odd-odd terms
        for i in range(r):
            extra = _mul(prof, _op(M, 1, i, x), _op(M, 1, r - 1 - i, y))
            rhs = rhs + ModuleElement(M, {(a, b + 1, j): c for (a, b, j), c in extra.terms.items()})
    assert lhs == rhs


@given(st.sampled_from(ALL_PROFILES), labels, labels)
def test_bockstein_is_a_derivation_on_bmu(prof, lx, ly):
    M = bmu_band(prof, -30, 30, 2)
    x, y = M.gen(lx), M.gen(ly)
    sign = -1 if (lx[0] and prof.prime != 2) else 1
    lhs = _op(M, 1, 0, _mul(prof, x, y))
    bx, by = _op(M, 1, 0, x), _op(M, 1, 0, y)
    rhs = _mul(prof, bx, y) + ModuleElement(M, {k: sign * c for k, c in _mul(prof, x, by).terms.items()})
    assert lhs == rhs


@pytest.mark.parametrize("prof", [TRIVIAL2, TRIVIAL3], ids=str)
def test_action_is_periodic_in_k(prof):
    p = prof.prime
    N = 2
    M = bmu_band(prof, -40, 40, N)
    for r in range(p ** N):
        for e in (0, 1):
            for i in (0, 1):
                for k in range(-6, 3):
                    a = M.rule(e, r, (i, k))
                    b = M.rule(e, r, (i, k + p ** N))
                    assert [c for c in a.values()] == [c for c in b.values()]


# -- maps ---------------------------------------------------------------------------

def test_psigma_inclusion_values():
    S = bsigma_band(TRIVIAL2, -2, 2, 2)
    B = bmu_band(TRIVIAL2, -4, 4, 2)
    assert psigma_inclusion(S.gen((1, 0)), B) == B.gen((1, 0))
    assert psigma_inclusion(S.gen((0, 2)), B) == B.gen((0, 2))
    assert psigma_inclusion(S.gen((0, 0)), B) == B.gen((0, 0))
    S3 = bsigma_band(TRIVIAL3, -1, 2, 2)
    B3 = bmu_band(TRIVIAL3, -4, 6, 2)
    assert psigma_inclusion(S3.gen((0, 2)), B3) == B3.gen((0, 4))
    assert psigma_inclusion(S3.gen((1, 0)), B3) == B3.element((1, 1), c=-1)
    with pytest.raises(ValueError):
        psigma_map(S3, bmu_band(TRIVIAL3, 0, 1, 2))


def test_band_maps_are_linear(profile):
    # matched bands: d^k -> v^((l-1)k) and c d^k -> u v^((l-1)k + l - 2)
    p = profile.prime
    S = bsigma_band(profile, -2, 2, 2)
    B = bmu_band(profile, -2 * (p - 1), 2 * (p - 1) + p - 2, 2)
    assert psigma_map(S, B).linearity_failures() == []
    L = lens_module(profile, 1, 4, 2)
    assert jstar_map(L).linearity_failures() == []
    assert jstar_map(L).is_injective_per_bidegree()
    assert identity_map(L).linearity_failures() == []
    assert zero_map(L, B).linearity_failures() == []


def test_jstar_keeps_absolute_labels():
    L = lens_module(TRIVIAL2, 1, 3, 2)
    j = jstar_map(L)
    assert j.tgt.params == {"kmin": -2, "kmax": 1, "m": 2, "n": 4}
    assert j(L.gen((0, -1))) == j.tgt.gen((0, -1))
    assert j(L.gen((1, 1))) == j.tgt.gen((1, 1))
    assert jstar(L.gen((1, 1))).terms == j.tgt.gen((1, 1)).terms


def test_pi_projection_values():
    # the source band reaches u v^5, the preimage of the top class c d^2
    src = suspend(bmu_band(TRIVIAL3, -4, 5, 2), 1, 0)
    tgt = suspend(bsigma_band(TRIVIAL3, -2, 2, 2), 1, 0)
    assert pi_projection(src.gen((0, 2)), tgt) == tgt.element((0, 1), c=-1)
    assert pi_projection(src.gen((1, 1)), tgt) == tgt.element((1, 0), c=-1)
    assert pi_projection(src.gen((0, 1)), tgt) == 0
    assert pi_map(src, tgt).linearity_failures() == []


def test_residue_values():
    M = suspend(bmu_band(REAL, -3, 3, 2), 1, 0)
    assert residue(M.gen((1, -1))) == HElement.one(REAL)
    assert residue(M.gen((0, -1))).is_zero()
    assert residue(M.element((1, -1), b=1)) == HElement.mono(REAL, 0, 1)
    with pytest.raises(ValueError):
        residue(bmu_band(REAL, -3, 3).gen((1, -1)))


@given(st.sampled_from(ALL_PROFILES), labels, st.integers(1, 8), st.integers(0, 1))
def test_residue_kills_positive_operations(prof, lab, r, e):
    M = suspend(bmu_band(prof, -20, 20, 2), 1, 0)
    if r >= prof.prime ** 2:
        return
    y = M.act(steenrod_p(prof, r, 2, beta=bool(e)), M.gen(lab))
    assert residue(y).is_zero()


def test_frobenius_adjoint_values():
    M = suspend(bmu_band(REAL, -3, 3, 2), 1, 0)
    rho = HElement.mono(REAL, 1, 0)
    assert frobenius_formula(M.gen((0, 0))) == {(1, -1): HElement.one(REAL)}
    assert frobenius_formula(M.gen((1, -1))) == {(0, 0): HElement.one(REAL), (1, 0): rho}


@given(st.sampled_from(ALL_PROFILES), labels)
def test_frobenius_formula_matches_the_residue_pairing(prof, lab):
    M = suspend(bmu_band(prof, -6, 6, 2), 1, 0)
    x = M.gen(lab)
    assert frobenius_formula(x) == frobenius_adjoint(x, (-8, 8))


# -- towers, suspension, parsing ----------------------------------------------------

def test_lens_tower_colimit_is_the_band():
    T = lens_tower(TRIVIAL2, 0, 4, 8, 2)
    C = tower_colim(T, window=(-6, 6))
    B = bmu_band(TRIVIAL2, -4, 7, 2)
    assert C.gens == B.gens
    for g in algebra_generators(TRIVIAL2, 2):
        for i in range(len(C)):
            assert C.gen_action(g, i) == B.gen_action(g, i)


def test_constant_and_zero_towers():
    L = lens_module(TRIVIAL3, 1, 3, 2)
    const = Tower([L, L], [identity_map(L)])
    assert tower_colim(const, window=(-10, 10)) is L
    other = lens_module(TRIVIAL3, 2, 4, 2)
    dead = Tower([L, other], [zero_map(L, other)])
    assert tower_colim(dead) is other
    with pytest.raises(ValueError):
        tower_colim(dead, window=(-10, 10))


def test_suspension_sign_on_odd_operations():
    M = bmu_band(TRIVIAL3, -2, 2, 2)
    S = suspend(M, 1, 0)
    assert S.act(steenrod_p(TRIVIAL3, 0, 2, beta=True), S.gen((1, 0))) == S.element((0, 1), c=-1)
    assert S.degree(S.index[(0, 0)]) == (1, 0)


def test_parse_module():
    assert parse_module("trivial", TRIVIAL2).kind == "trivial"
    assert parse_module("lens:m=2,n=6", TRIVIAL2).params["m"] == 2
    assert parse_module("bmu:-3..3", COMPLEX).params == {"kmin": -3, "kmax": 3}
    assert parse_module("susp:1,0:bsigma:-2..2", TRIVIAL3).shift == (1, 0)
    assert len(parse_module("tower:lens:m0=0,m1=4,n=8", TRIVIAL2)) == 5
    assert len(parse_module("tower:lens:0..2,n=5", TRIVIAL2)) == 3
    with pytest.raises(ValueError):
        parse_module("lens:m=2", TRIVIAL2)
    with pytest.raises(ValueError):
        parse_module("sphere", TRIVIAL2)


def test_json_description_is_deterministic():
    a = bmu_band(REAL, -2, 2, 2).to_json()
    b = bmu_band(REAL, -2, 2, 2).to_json()
    assert a == b and '"generators"' in a
