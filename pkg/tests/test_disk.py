import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l2vhs.disk.estimates import (
    FrameModel,
    frame_growth_fit,
    growth_fit,
    il_constant,
    log_grid,
    unit_disk_il_constant,
    wirtinger_constant,
)
from l2vhs.disk.forms import ModeForm, closedness_defect, d_twisted, weighted_norm
from l2vhs.disk.probe import Frame, local_vanishing_probe, random_graded_closed_1form, reduce_closed, random_2form
from l2vhs.disk.radial import DEFAULT_QUADRATURE, LogMonomialSum
from l2vhs.disk.series import nabla_primitive_series, residue_reduction, verify_primitive, verify_primitive_matrix
from l2vhs.disk.solvers import RESIDUE, dbar_mode_solve, solve_mode, solve_mode2
from l2vhs.errors import (
    ExcludedWeightError,
    InputError,
    InsufficientSamplesError,
    NotClosedError,
    NotNilpotentError,
    ObstructionError,
)
from l2vhs.numeric import Matrix
from l2vhs.weights import LocalType, weight_filtration

ONE = LogMonomialSum.constant(1)
ZERO = LogMonomialSum()


def mono(c, a, b=0):
    return LogMonomialSum.monomial(c, a, b)


# ---------------------------------------------------------------- weighted norms

def test_weighted_norm_examples():
    h = ModeForm(0, 0, 0, 0.5, {0: (ONE,)})
    assert weighted_norm(h).squared == pytest.approx(2 * math.pi / math.log(2), rel=1e-9)
    assert not weighted_norm(ModeForm(0, 0, 2, 0.5, {0: (ONE,)})).finite
    assert weighted_norm(ModeForm(0, 0, 0, 0.5)).value == 0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([Fraction(0), Fraction(-1, 2), Fraction(-1, 3)]), st.integers(-3, 3),
       st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3, 2)]), st.integers(0, 2),
       st.floats(0.1, 0.9))
def test_weighted_norm_matches_mpmath(beta, k, shift, b, R):
    """Degree-0 norm of r^a u^b against an independent quadrature in r."""
    a = -beta + shift
    form = ModeForm(0, beta, k, R, {2: (mono(1.0, a, b),)})
    got = weighted_norm(form).squared
    f = lambda r: r ** float(2 * a) * (-mpmath.log(r)) ** (2 * b) * r ** float(2 * beta) \
        * (-mpmath.log(r)) ** (k - 2) / r
    want = 2 * math.pi * float(mpmath.quad(f, [0, R * 1e-6, R * 1e-3, R]))
    assert got == pytest.approx(want, rel=1e-7)


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False))
def test_weighted_norm_scaling(c):
    form = ModeForm(1, Fraction(-1, 2), 1, 0.5, {1: (mono(1, Fraction(1, 2)), mono(2j, Fraction(1)))})
    assert weighted_norm(form.scale(c)).value == pytest.approx(abs(c) * weighted_norm(form).value, rel=1e-9,
                                                               abs=1e-12)


# ---------------------------------------------------------------- mode solvers

def test_solve_mode_nonzero_beta():
    # g_1 = r; closedness g' + (beta/r) g = i(n + beta) f gives f_1 = -i
    eta = ModeForm(1, Fraction(-1, 2), 0, 0.5, {1: (LogMonomialSum.constant(-1j), mono(1, 1))})
    sol = solve_mode(eta)
    (h,) = sol.nu.mode(1)
    assert h.close_to(mono(-2j, 1), 1e-14)
    assert sol.exact and sol.residual_norm == 0
    assert math.isfinite(sol.ratio)


def test_solve_mode_radial_branch():
    eta = ModeForm(1, 0, 3, 0.5, {0: (ONE, ZERO)})
    sol = solve_mode(eta)
    assert sol.nu.mode(0)[0].close_to(mono(1, 1), 1e-14)
    assert sol.exact


def test_solve_mode_obstruction_and_closedness():
    with pytest.raises(ObstructionError) as info:
        solve_mode(ModeForm(1, 0, 0, 0.5, {0: (ZERO, ONE)}))
    assert info.value.g0 == 1
    with pytest.raises(NotClosedError):
        solve_mode(ModeForm(1, 0, 0, 0.5, {1: (ONE, ZERO)}))


@pytest.mark.parametrize("k", range(-6, 6))
def test_obstruction_dichotomy(k):
    eta = ModeForm(1, 0, k, 0.5, {0: (ZERO, LogMonomialSum.constant(0.7 - 0.2j))})
    if k >= -1:
        with pytest.raises(ObstructionError):
            solve_mode(eta)
    else:
        sol = solve_mode(eta)
        assert sol.channel == RESIDUE
        # both correction terms are square integrable on this weight
        assert weighted_norm(sol.nu).finite and weighted_norm(sol.residual).finite


def _residual_ratio(eta, quad=DEFAULT_QUADRATURE):
    sol = solve_mode(eta, quad=quad)
    return sol.residual_norm / sol.input_norm, sol.ratio, sol


def test_random_graded_forms_solve_and_bounds_are_stable():
    rng = random.Random(4)
    for _ in range(40):
        beta = rng.choice([Fraction(-1, 2), Fraction(-1, 3), Fraction(-3, 4), Fraction(0)])
        k = rng.choice([-3, -2, 0, 2, 3]) if beta == 0 else rng.randint(-3, 3)
        eta = random_graded_closed_1form(beta, k, 0.5, rng)
        if eta.is_zero():
            continue
        assert closedness_defect(eta) < 1e-12
        rel, ratio, sol = _residual_ratio(eta)
        if sol.exact:
            assert rel <= 1e-9
        rel2, ratio2, _ = _residual_ratio(eta, DEFAULT_QUADRATURE.doubled())
        assert abs(ratio2 - ratio) <= 0.1 * ratio


def test_solve_mode2_examples():
    eta = ModeForm(2, Fraction(-1, 2), 0, 0.5, {2: (mono(1, Fraction(1, 2)),)})
    sol = solve_mode2(eta)
    assert sol.exact and sol.residual_norm == 0
    assert sol.nu.mode(2)[0].close_to(mono(-1 / (1j * 1.5), Fraction(1, 2)), 1e-14)
    eta = ModeForm(2, 0, -1, 0.5, {0: (mono(1, 1),)})
    assert solve_mode2(eta).channel  # the k = -1 area channel


# ---------------------------------------------------------------- primitive series and residues

def test_series_examples():
    s = nabla_primitive_series([1], 0)
    assert s.coeffs == {(1, 0): 1}
    n2 = Matrix.from_rows([[0, 1], [0, 0]])
    s = nabla_primitive_series([1], 0, n2)
    assert s.coeffs == {(1, 0): 1, (1, 1): -1}
    assert verify_primitive(s, [1]) and verify_primitive_matrix(s, [1], n2)
    s = nabla_primitive_series([0, 1], Fraction(-1, 2))
    assert s.coeffs == {(Fraction(3, 2), 0): Fraction(2, 3)}
    with pytest.raises(NotNilpotentError):
        nabla_primitive_series([1], 0, Matrix.identity(2))


def _jordan(blocks):
    n = sum(blocks)
    rows = [[0] * n for _ in range(n)]
    pos = 0
    for m in blocks:
        for i in range(m - 1):
            rows[pos + i + 1][pos + i] = 1
        pos += m
    return Matrix.from_rows(rows)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.lists(st.fractions(max_denominator=6), min_size=1, max_size=9),
       st.sampled_from([Fraction(0), Fraction(-1, 2), Fraction(-2, 3), Fraction(-5, 6)]))
def test_series_is_exact_primitive(q, a, beta):
    nmat = _jordan([q])
    s = nabla_primitive_series(a, beta, nmat)
    assert verify_primitive(s, a)
    assert verify_primitive_matrix(s, a, nmat)


def test_residue_reduction_examples():
    n2 = _jordan([2])  # e_low = N e_high
    e_high = Matrix.from_rows([[1], [0]])
    e_low = n2 @ e_high
    red = residue_reduction({-1: 1, 0: 3}, n2, e_low)
    assert (n2 @ red.lift).equals(e_low) and red.residue == 1 and red.series == (3,)
    assert residue_reduction({0: 1, 1: 2}, n2, e_low).lift is None
    n3 = _jordan([3])
    bottom = Matrix.from_rows([[0], [0], [1]])
    red = residue_reduction({-1: 2}, n3, bottom)
    assert (n3 @ red.lift).equals(bottom)
    assert red.correction == pytest.approx(2 * 2j * math.pi)
    wf = weight_filtration(n3)
    from l2vhs.numeric import contains_span

    assert contains_span(wf.W(0), red.lift)


# ---------------------------------------------------------------- d-bar and constants

def test_dbar_examples():
    sol = dbar_mode_solve(1, 0, 0, Fraction(-1, 2), 0, 0.5)
    assert (sol.coefficient, sol.power, sol.mode, sol.log) == (1, 1, -1, 0)  # g = zbar
    assert math.isfinite(sol.ratio) and sol.ratio > 0
    assert dbar_mode_solve(0, 0, 0, Fraction(-1, 2), 0, 0.5).g_norm == 0
    with pytest.raises(ExcludedWeightError):
        dbar_mode_solve(1, 0, 0, 0, 1, 0.5)
    sol = dbar_mode_solve(1, 1, 3, Fraction(-1, 2), 0, 0.5)  # a - n + 2 = 0 branch
    assert sol.log == 1


def test_il_constant():
    assert unit_disk_il_constant() == 384
    assert il_constant(2, math.pi / 3) == pytest.approx(384)
    # doubling the domain: Diam^4 grows by 16, the distance integral by 8
    assert il_constant(4, Fraction(8, 3), dist_in_pi_units=True) / unit_disk_il_constant() == 2
    with pytest.raises(InputError):
        il_constant(0, 1)


def test_growth_fit_examples():
    r = log_grid(1e-8, 1e-2, 64)
    fit = growth_fit(r, r ** -1 * np.log(1 / r) ** 2)
    assert abs(fit.two_beta + 1) <= 0.05 and abs(fit.k - 2) <= 0.15
    fit = growth_fit(r, np.ones_like(r))
    assert abs(fit.two_beta) <= 0.05 and abs(fit.k) <= 0.15
    fit = frame_growth_fit(LocalType.of({0: [2]}), 0)
    assert abs(fit.two_beta) <= 0.05 and abs(fit.k - 1) <= 0.15
    with pytest.raises(InsufficientSamplesError):
        growth_fit(r[:10], r[:10])
    with pytest.raises(InputError):
        growth_fit(np.linspace(0.1, 0.5, 30), np.ones(30))


@settings(max_examples=15, deadline=None)
@given(st.dictionaries(st.sampled_from([Fraction(0), Fraction(-1, 2), Fraction(-1, 4)]),
                       st.lists(st.integers(1, 4), min_size=1, max_size=2), min_size=1, max_size=2),
       st.integers(0, 100))
def test_frame_model_is_adapted(parts, seed):
    t = LocalType.of(parts)
    model = FrameModel.from_local_type(t, seed=seed)
    lo, hi = model.adapted_constants(log_grid(1e-8, 1e-2, 16))
    assert 0.5 < lo <= 1 <= hi < 1.5
    rng = np.random.default_rng(seed)
    for r in (1e-6, 1e-3):
        c = rng.normal(size=t.n) + 1j * rng.normal(size=t.n)
        assert lo - 1e-12 <= model.combination_ratio(c, r) <= hi + 1e-12


def test_wirtinger_constant_against_bessel_zero():
    est = wirtinger_constant()
    exact = 1 / float(mpmath.besseljzero(1, 1, derivative=1))
    assert est.constant == pytest.approx(exact, rel=1e-6)
    assert est.sampled_max <= est.constant + 1e-12


# ---------------------------------------------------------------- full local probe

def test_probe_examples():
    rep = local_vanishing_probe(LocalType.of({Fraction(-1, 2): [1]}), 50, seed=1)
    assert rep.success and max(rep.degree1_max_residual, rep.degree2_max_residual) <= rep.tolerance
    rep = local_vanishing_probe(LocalType.of({0: [2]}), 50, seed=2)
    assert rep.success and rep.channels_used
    rep = local_vanishing_probe(LocalType.of({0: [3]}), 5, zero_forms=True)
    assert rep.success and rep.max_ratio == 0


def test_reduction_is_a_primitive():
    t = LocalType.of({Fraction(-1, 3): [2], 0: [2, 1]})
    frame = Frame.from_local_type(t)
    rng = random.Random(8)
    for _ in range(5):
        eta = random_2form(frame, 0.5, rng)
        red = reduce_closed(frame, eta)
        assert red.relative_residual <= 1e-9
        assert all(d_twisted(f).degree == 2 for f in red.primitive if f.degree == 1)
