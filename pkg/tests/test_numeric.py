import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l2vhs.errors import IrrationalRotationError, NotQuasiUnitaryError, NotUnipotentError
from l2vhs.numeric import (
    INFINITE_WITHIN_CAP,
    GaussianRational,
    Matrix,
    eig_unit_circle,
    format_scalar,
    kernel_basis,
    matrix_order,
    nilpotent_exp,
    nilpotent_log,
    nullity,
    parse_scalar,
    rank,
)
from l2vhs.random_instances import random_nilpotent, random_unimodular

small_int = st.integers(-4, 4)


def int_matrix(rows, cols):
    return st.lists(st.lists(small_int, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


# ---------------------------------------------------------------- rank and kernels

@pytest.mark.parametrize("exact", [True, False])
def test_rank_examples(exact):
    assert rank(Matrix.identity(3, exact)) == 3
    assert rank(Matrix.zeros(2, 5, exact)) == 0
    assert rank(Matrix.from_rows([[1, 1], [1, 1]], exact)) == 1


@pytest.mark.parametrize("exact", [True, False])
def test_kernel_examples(exact):
    assert kernel_basis(Matrix.identity(3, exact)) == []
    assert len(kernel_basis(Matrix.zeros(3, 3, exact))) == 3
    (v,) = kernel_basis(Matrix.from_rows([[0, 1], [0, 0]], exact))
    assert v.to_numpy()[1, 0] == 0 and v.to_numpy()[0, 0] != 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: int_matrix(r, c))))
def test_rank_matches_numpy_and_kernel_is_null(rows):
    m = Matrix.from_rows(rows)
    r = rank(m)
    assert r == np.linalg.matrix_rank(np.array(rows, dtype=float))
    assert rank(m.to_float()) == r
    basis = kernel_basis(m)
    assert len(basis) + r == m.cols
    for v in basis:
        assert (m @ v).is_zero()


def test_rank_invariant_under_permutation_and_invertible_products():
    rng = random.Random(11)
    for _ in range(100):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = [[rng.randint(-2, 2) for _ in range(c)] for _ in range(r)]
        if rng.random() < 0.5 and r > 1:
            rows[-1] = [a + b for a, b in zip(rows[0], rows[1 % r])]
        m = Matrix.from_rows(rows)
        base = rank(m)
        perm_rows = rows[:]
        rng.shuffle(perm_rows)
        assert rank(Matrix.from_rows(perm_rows)) == base
        left, right = random_unimodular(r, rng), random_unimodular(c, rng)
        assert rank(left @ m @ right) == base
        assert rank((left @ m @ right).to_float()) == base


def test_gaussian_entries():
    m = Matrix.from_rows([[1, 1j], [1j, -1]])  # second row is i times the first
    assert rank(m) == 1
    assert nullity(m) == 1


# ---------------------------------------------------------------- scalars

@settings(max_examples=100, deadline=None)
@given(st.fractions(max_denominator=50), st.fractions(max_denominator=50))
def test_scalar_round_trip(re_, im_):
    x = GaussianRational(re_, im_)
    assert parse_scalar(format_scalar(x)) == x


def test_scalar_forms():
    assert parse_scalar("1/2+3/4 i") == GaussianRational(Fraction(1, 2), Fraction(3, 4))
    assert parse_scalar("0.25") == GaussianRational(Fraction(1, 4), 0)
    assert parse_scalar("-2") == GaussianRational(-2, 0)


# ---------------------------------------------------------------- orders, logs, eigenstructure

def test_matrix_order_examples():
    assert matrix_order(Matrix.from_rows([[0, -1], [1, 0]])) == 4
    assert matrix_order(Matrix.identity(3)) == 1
    assert matrix_order(Matrix.from_rows([[1, 1], [0, 1]]), 12) == INFINITE_WITHIN_CAP


def test_nilpotent_log_examples():
    assert nilpotent_log(Matrix.identity(2)).is_zero()
    assert nilpotent_log(Matrix.from_rows([[1, 1], [0, 1]])).equals(Matrix.from_rows([[0, 1], [0, 0]]))
    want = Matrix.from_rows([[0, 1, Fraction(-1, 2)], [0, 0, 1], [0, 0, 0]])
    assert nilpotent_log(Matrix.from_rows([[1, 1, 0], [0, 1, 1], [0, 0, 1]])).equals(want)
    with pytest.raises(NotUnipotentError):
        nilpotent_log(Matrix.from_rows([[2, 0], [0, 1]]))


def test_exp_log_round_trip_against_mpmath():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(1, 6)
        u = Matrix.identity(n) + random_nilpotent(n, rng)
        log_u = nilpotent_log(u)
        assert nilpotent_exp(log_u).equals(u)
        oracle = mpmath.expm(mpmath.matrix(log_u.to_numpy().real.tolist()))
        assert np.allclose(np.array(oracle.tolist(), dtype=float), u.to_numpy().real, atol=1e-9)
        assert nilpotent_exp(nilpotent_log(u.to_float())).equals(u.to_float())


@pytest.mark.parametrize("exact", [True, False])
def test_eig_examples(exact):
    (part,) = eig_unit_circle(Matrix.from_rows([[1, 1], [0, 1]], exact))
    assert part.alpha == 0 and part.basis.cols == 2 and part.blocks == (2,)
    parts = eig_unit_circle(Matrix.diag([-1, 1], exact))
    assert [p.alpha for p in parts] == [Fraction(-1, 2), 0]
    assert parts[0].basis.to_numpy()[1, 0] == 0
    parts = eig_unit_circle(Matrix.from_rows([[0, -1], [1, 0]], exact))
    assert [p.alpha for p in parts] == [Fraction(-3, 4), Fraction(-1, 4)]
    assert all(p.basis.cols == 1 for p in parts)


def test_eig_errors():
    with pytest.raises(NotQuasiUnitaryError):
        eig_unit_circle(Matrix.diag([2, 1]))
    with pytest.raises(NotQuasiUnitaryError):
        eig_unit_circle(Matrix.diag([2, 1], exact=False))
    rot = Matrix.from_rows([[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]])
    with pytest.raises(IrrationalRotationError):
        eig_unit_circle(rot)


def test_eig_spaces_are_complementary():
    rng = random.Random(5)
    from l2vhs.random_instances import random_monomial, random_triangular

    for _ in range(40):
        n = rng.randint(1, 5)
        base = random_triangular(n, rng) if rng.random() < 0.5 else random_monomial(n, rng)
        conj = random_unimodular(n, rng)
        m = conj @ base @ conj.inverse()
        parts = eig_unit_circle(m)
        assert len({p.alpha for p in parts}) == len(parts)
        assert all(-1 < p.alpha <= 0 for p in parts)
        from l2vhs.numeric import hstack

        assert rank(hstack([p.basis for p in parts])) == n
        assert sum(p.basis.cols for p in parts) == n
