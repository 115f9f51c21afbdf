"""Mode-by-mode primitives on one graded piece (beta, k) of the punctured disk."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..config import DEFAULT
from ..errors import ExcludedWeightError, NotClosedError, ObstructionError
from .forms import ModeForm, d_twisted, weighted_norm
from .radial import DEFAULT_QUADRATURE, LogMonomialSum, Quadrature, as_exponent, weighted_square_integral

# Names of the channels where a closed form can fail to be D-exact on a graded piece.
RADIAL_K1 = "radial remainder at k=1"
RESIDUE = "dz/z residue term"
AREA_KM1 = "radial area term at k=-1"


@dataclass(frozen=True, eq=False)
class ModeSolution:
    nu: ModeForm
    residual: ModeForm  # eta - D nu
    channel: str  # "" when the residual vanishes
    ratio: float  # |nu| / |eta|
    residual_norm: float
    input_norm: float
    g0: complex = 0j

    @property
    def exact(self) -> bool:
        return self.channel == ""


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return num / den


def _is_zero_beta(beta: Fraction) -> bool:
    return beta == 0


def _constant_value(g: LogMonomialSum, tol: float) -> complex:
    """The constant term of g, insisting that g is constant up to tol."""
    rest = LogMonomialSum({k: v for k, v in g.terms.items() if k != (0, 0)})
    if not rest.is_zero(tol):
        raise NotClosedError("zero mode of the dtheta channel is not constant")
    return g.terms.get((Fraction(0), 0), 0j)


def solve_mode(eta: ModeForm, tol: float = DEFAULT.tol, quad: Quadrature = DEFAULT_QUADRATURE,
               with_norms: bool = True) -> ModeSolution:
    """Primitive nu of a closed 1-form on the piece (beta, k).

    h_n = g_n / (i(n + beta)) for n + beta != 0.  For beta = 0 the zero mode
    f_0 dr is integrated from 0 (k > 1) or towards R (k < 1); k = 1 leaves it
    as residual.  A constant g_0 dtheta is an obstruction for k >= -1 and for
    k < -1 is rewritten as (g_0/i) dz/z - D((g_0/i) ln r), leaving the dz/z
    term as residual.
    """
    if eta.degree != 1:
        raise ValueError("solve_mode expects a 1-form")
    scale = max(eta.max_coeff(), 1.0)
    defect = d_twisted(eta).max_coeff()
    if defect > tol * scale:
        raise NotClosedError(f"form is not closed (defect {defect:.3g})")
    beta = eta.beta
    nu_modes = {}
    channel = ""
    g0 = 0j
    for n, (f, g) in eta.modes.items():
        if n + beta != 0:
            nu_modes[n] = (g.scale(1 / (1j * (n + float(beta)))),)
            continue
        g0 = _constant_value(g, tol * scale)
        h = LogMonomialSum()
        if abs(g0) > tol * scale:
            if eta.k >= -1:
                raise ObstructionError(g0)
            h = h + LogMonomialSum.monomial(g0 / 1j, 0, 1)  # (g0/i) u = -(g0/i) ln r
            channel = RESIDUE
        if not f.is_zero(tol * scale):
            if eta.k > 1:
                h = h + f.primitive_from_zero()
            elif eta.k < 1:
                h = h + f.primitive_to(eta.R)
            else:
                channel = RADIAL_K1
        nu_modes[n] = (h,)
    nu = eta.like(degree=0, modes=nu_modes)
    residual = eta - d_twisted(nu)
    if not channel:
        residual = _chop(residual, tol * scale)
    if not with_norms:
        return ModeSolution(nu, residual, channel, math.nan, math.nan, math.nan, g0)
    n_eta = weighted_norm(eta, quad).value
    n_nu = weighted_norm(nu, quad).value
    n_res = weighted_norm(residual, quad).value
    return ModeSolution(nu, residual, channel, _ratio(n_nu, n_eta), n_res, n_eta, g0)


def solve_mode2(eta: ModeForm, tol: float = DEFAULT.tol, quad: Quadrature = DEFAULT_QUADRATURE,
                with_norms: bool = True) -> ModeSolution:
    """Primitive 1-form of a 2-form h dr^dtheta on the piece (beta, k).

    nu_n = -h_n / (i(n + beta)) dr for n + beta != 0.  For beta = 0 the zero
    mode is d(f dtheta) with f integrated from 0 (k > -1) or towards R
    (k < -1); k = -1 leaves it as residual.
    """
    if eta.degree != 2:
        raise ValueError("solve_mode2 expects a 2-form")
    scale = max(eta.max_coeff(), 1.0)
    beta = eta.beta
    nu_modes = {}
    channel = ""
    for n, (h,) in eta.modes.items():
        if n + beta != 0:
            nu_modes[n] = (h.scale(-1 / (1j * (n + float(beta)))), LogMonomialSum())
            continue
        if h.is_zero(tol * scale):
            continue
        if eta.k > -1:
            f = h.primitive_from_zero()
        elif eta.k < -1:
            f = h.primitive_to(eta.R)
        else:
            channel = AREA_KM1
            continue
        nu_modes[n] = (LogMonomialSum(), f)
    nu = eta.like(degree=1, modes=nu_modes)
    residual = eta - d_twisted(nu)
    if not channel:
        residual = _chop(residual, tol * scale)
    if not with_norms:
        return ModeSolution(nu, residual, channel, math.nan, math.nan, math.nan)
    n_eta = weighted_norm(eta, quad).value
    n_nu = weighted_norm(nu, quad).value
    n_res = weighted_norm(residual, quad).value
    return ModeSolution(nu, residual, channel, _ratio(n_nu, n_eta), n_res, n_eta)


def _chop(form: ModeForm, tol: float) -> ModeForm:
    """Drop round-off terms below tol."""
    out = {}
    for n, cs in form.modes.items():
        out[n] = tuple(LogMonomialSum({k: v for k, v in c.terms.items() if abs(v) > tol}) for c in cs)
    return form.like(modes=out)


# ---------------------------------------------------------------- d-bar

@dataclass(frozen=True)
class DbarSolution:
    coefficient: complex  # g = coefficient * r^{power} (ln r)^{log} e^{i mode theta}
    power: Fraction
    log: int
    mode: int
    ratio: float  # |g xi| / |f dzbar xi|
    g_norm: float
    f_norm: float


def dbar_mode_solve(coefficient: complex, a, n: int, beta, k: int, R: float,
                    quad: Quadrature = DEFAULT_QUADRATURE) -> DbarSolution:
    """Solve dg/dzbar = c r^a e^{in theta} on one mode.

    With dbar = (1/2) e^{i theta}(d_r + (i/r) d_theta), the particular solution
    is g = 2c/(a - n + 2) r^{a+1} e^{i(n-1)theta}; when a - n + 2 = 0 it is
    2c r^{a+1} ln r e^{i(n-1)theta}.  Norms: 0-form weight r^{2beta-1}u^{k-2}
    for g and 2 r^{2beta+1} u^k for f dzbar (|dzbar|^2 = 2 |dr|^2).
    """
    beta = as_exponent(beta)
    a = as_exponent(a)
    if beta * (k - 1) == 0:
        raise ExcludedWeightError("the d-bar estimate needs beta (k - 1) != 0")
    coefficient = complex(coefficient)
    if coefficient == 0:
        return DbarSolution(0j, a + 1, 0, n - 1, 0.0, 0.0, 0.0)
    denom = a - n + 2
    if denom != 0:
        c = 2 * coefficient / float(denom)
        g = LogMonomialSum.monomial(c, a + 1, 0)
        log = 0
    else:
        c = 2 * coefficient
        g = LogMonomialSum.monomial(-c, a + 1, 1)  # ln r = -u
        log = 1
    f = LogMonomialSum.monomial(coefficient, a, 0)
    g_sq = 2 * math.pi * weighted_square_integral([g], 2 * beta - 1, k - 2, R, quad)
    f_sq = 2 * math.pi * 2 * weighted_square_integral([f], 2 * beta + 1, k, R, quad)
    g_norm, f_norm = math.sqrt(g_sq), math.sqrt(f_sq)
    return DbarSolution(c, a + 1, log, n - 1, _ratio(g_norm, f_norm), g_norm, f_norm)
