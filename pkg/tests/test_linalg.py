from hypothesis import given, strategies as st

from msing.linalg import Reducer, kernel, rank, solve, vadd

NCOLS = 6


def dense_rank(p, rows):
    """Textbook Gaussian elimination on dense lists, the oracle for rank."""
    m = [[r.get(j, 0) % p for j in range(NCOLS)] for r in rows]
    rk = 0
    for col in range(NCOLS):
        piv = next((i for i in range(rk, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        inv = pow(m[rk][col], p - 2, p)
        m[rk] = [x * inv % p for x in m[rk]]
        for i in range(len(m)):
            if i != rk and m[i][col]:
                f = m[i][col]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[rk])]
        rk += 1
    return rk


@st.composite
def matrices(draw):
    p = draw(st.sampled_from([2, 3, 5]))
    rows = draw(st.lists(st.dictionaries(st.integers(0, NCOLS - 1), st.integers(1, p - 1),
                                         max_size=NCOLS), max_size=7))
    return p, rows


def combine(p, rows, coeffs):
    out = {}
    for i, c in coeffs.items():
        out = vadd(p, out, rows[i], c)
    return out


@given(matrices())
def test_rank_matches_dense_elimination(m):
    p, rows = m
    assert rank(p, rows) == dense_rank(p, rows)


@given(matrices())
def test_kernel_vectors_are_annihilated_and_count_nullity(m):
    p, rows = m
    ker = kernel(p, rows)
    assert len(ker) == len(rows) - dense_rank(p, rows)
    for v in ker:
        assert v and not combine(p, rows, v)
    # the kernel vectors are independent
    assert rank(p, [{i: c for i, c in v.items()} for v in ker]) == len(ker)


@given(matrices(), st.data())
def test_solve_reconstructs_targets_in_the_span(m, data):
    p, rows = m
    coeffs = {i: data.draw(st.integers(0, p - 1)) for i in range(len(rows))}
    target = combine(p, rows, coeffs)
    x = solve(p, rows, target)
    assert x is not None
    assert combine(p, rows, x) == target


def test_solve_outside_span():
    assert solve(3, [{0: 1}, {0: 2}], {1: 1}) is None


@given(matrices())
def test_reduce_splits_into_remainder_plus_combo(m):
    p, rows = m
    red = Reducer(p)
    for i, r in enumerate(rows[:-1]):
        red.add(r, i)
    if rows:
        v = rows[-1]
        rem, combo = red.reduce(v)
        # v = rem + sum combo[t] * (row with tag t)
        assert vadd(p, rem, combine(p, rows, combo)) == {k: c % p for k, c in v.items() if c % p}
