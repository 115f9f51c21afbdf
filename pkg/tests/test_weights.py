import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l2vhs.errors import NotNilpotentError
from l2vhs.numeric import Matrix, hstack, kernel_matrix, rank, same_span
from l2vhs.random_instances import random_nilpotent
from l2vhs.weights import (
    LocalType,
    check_weight_axioms,
    growth_exponents,
    lattice_dims,
    local_h0,
    local_type,
    pullback_local_type,
    same_filtration,
    weight_filtration,
)


def _col_space(m: Matrix) -> Matrix:
    from l2vhs.gamma import column_space

    return column_space(m)


def _intersect(u: Matrix, v: Matrix) -> Matrix:
    if u.cols == 0 or v.cols == 0:
        return u.like_zeros(u.rows, 0)
    k = kernel_matrix(hstack([u, v.scale(-1)]))
    return _col_space(u @ k.row_slice(list(range(u.cols))))


def _power(n: Matrix, k: int) -> Matrix:
    out = n.like_identity()
    for _ in range(k):
        out = out @ n
    return out


def oracle_w(n: Matrix, k: int) -> Matrix:
    """W_k = sum over j >= max(0, -k) of ker N^{k+j+1} intersected with im N^j."""
    dim = n.rows
    pieces = []
    for j in range(max(0, -k), dim + 1):
        if k + j + 1 < 0:
            continue
        pieces.append(_intersect(kernel_matrix(_power(n, k + j + 1)), _col_space(_power(n, j))))
    pieces = [p for p in pieces if p.cols]
    return _col_space(hstack(pieces)) if pieces else n.like_zeros(dim, 0)


def test_weight_filtration_examples():
    wf = weight_filtration(Matrix.zeros(3, 3))
    assert wf.dim(-1) == 0 and wf.dim(0) == 3
    assert weight_filtration(Matrix.from_rows([[0, 1], [0, 0]])).graded_dims() == {1: 1, -1: 1}
    n3 = Matrix.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert weight_filtration(n3).graded_dims() == {2: 1, 0: 1, -2: 1}
    with pytest.raises(NotNilpotentError):
        weight_filtration(Matrix.identity(2))


def test_weight_filtration_matches_closed_form_oracle():
    rng = random.Random(9)
    for _ in range(40):
        n = random_nilpotent(rng.randint(1, 6), rng)
        wf = weight_filtration(n)
        assert check_weight_axioms(n, wf)
        for k in range(wf.k_min - 1, wf.k_max + 2):
            want = oracle_w(n, k)
            got = wf.W(k)
            assert rank(got) == rank(want) if want.cols else got.cols == 0
            if want.cols:
                assert same_span(got, want)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10_000), st.sampled_from([2, 3, 5]))
def test_scaling_invariance(n, seed, c):
    nmat = random_nilpotent(n, random.Random(seed))
    wf = weight_filtration(nmat)
    assert check_weight_axioms(nmat, wf)
    assert same_filtration(wf, weight_filtration(nmat.scale(c)))


def test_local_type_examples():
    assert local_type(Matrix.identity(2)) == LocalType.of({0: [1, 1]})
    assert local_type(Matrix.from_rows([[1, 1], [0, 1]])) == LocalType.of({0: [2]})
    assert local_type(Matrix.diag([-1, -1, 1])) == LocalType.of({Fraction(-1, 2): [1, 1], 0: [1]})


def test_pullback_examples():
    assert pullback_local_type(LocalType.of({Fraction(-1, 2): [1]}), 2) == LocalType.of({0: [1]})
    t = LocalType.of({Fraction(-1, 3): [2], Fraction(-1, 5): [1]})
    assert pullback_local_type(t, 1) == t
    t = LocalType.of({Fraction(-1, 3): [2], Fraction(-2, 3): [1]})
    assert pullback_local_type(t, 3) == LocalType.of({0: [2, 1]})


local_types = st.dictionaries(
    st.sampled_from([Fraction(0), Fraction(-1, 2), Fraction(-1, 3), Fraction(-2, 3), Fraction(-1, 4), Fraction(-5, 6)]),
    st.lists(st.integers(1, 4), min_size=1, max_size=3),
    min_size=1, max_size=3,
).map(LocalType.of)


@settings(max_examples=60, deadline=None)
@given(local_types, st.integers(1, 6), st.integers(1, 6))
def test_pullback_composes(t, m, n):
    assert pullback_local_type(t, m * n) == pullback_local_type(pullback_local_type(t, n), m)
    assert pullback_local_type(t, n).n == t.n


def test_growth_exponent_examples():
    def triples(t):
        return [(g.beta, g.k, g.multiplicity) for g in growth_exponents(t)]

    assert triples(LocalType.of({0: [2]})) == [(0, 1, 1), (0, -1, 1)]
    assert triples(LocalType.of({0: [1]})) == [(0, 0, 1)]
    assert triples(LocalType.of({Fraction(-1, 2): [1]})) == [(Fraction(-1, 2), 0, 1)]


@settings(max_examples=60, deadline=None)
@given(local_types)
def test_growth_multiplicities_and_local_h0(t):
    for alpha, blocks in t.parts:
        assert sum(g.multiplicity for g in growth_exponents(t) if g.beta == alpha) == sum(blocks)
    uni = t.unipotent_blocks
    assert local_h0(t) == sum(1 for m in uni for k in range(m - 1, -m, -2) if k <= 0)
    assert local_h0(t) <= sum(uni)
    dims = lattice_dims(t)
    assert 0 <= dims.d1 <= dims.n and 0 <= dims.d0 <= dims.n


def test_lattice_and_local_h0_examples():
    def pair(parts):
        d = lattice_dims(LocalType.of(parts))
        return d.d0, d.d1

    assert pair({0: [2]}) == (1, 0)
    assert pair({0: [1]}) == (1, 0)
    assert pair({Fraction(-1, 2): [1]}) == (1, 1)
    assert local_h0(LocalType.of({0: [2]})) == 1
    assert local_h0(LocalType.of({Fraction(-1, 2): [1, 1]})) == 0
    assert local_h0(LocalType.of({0: [1, 1, 1]})) == 3
