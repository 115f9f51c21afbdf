"""Constants and fits around the disk model: the Iwaniec-Lutoborski constant,
growth-exponent fitting, a synthetic L2-adapted frame, and the Wirtinger
constant of the Euclidean unit disk."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import InputError, InsufficientSamplesError
from ..weights import LocalType, growth_exponents


# ---------------------------------------------------------------- Iwaniec-Lutoborski

def il_constant(diameter, dist_integral, dist_in_pi_units: bool = False):
    """C = 2^n sigma_{n-1} Diam^{n+2} / int dist(x, boundary) for n = 2, sigma_1 = 2 pi.

    With ``dist_in_pi_units`` the integral is given as a multiple of pi, the
    pi cancels and rational inputs give an exact Fraction.
    """
    if diameter <= 0 or dist_integral <= 0:
        raise InputError("diameter and distance integral must be positive")
    if dist_in_pi_units and all(isinstance(x, (int, Fraction)) for x in (diameter, dist_integral)):
        return Fraction(4 * 2) * Fraction(diameter) ** 4 / Fraction(dist_integral)
    dist = float(dist_integral) * (math.pi if dist_in_pi_units else 1.0)
    return 4 * 2 * math.pi * float(diameter) ** 4 / dist


def unit_disk_il_constant():
    """Unit disk: Diam = 2 and int (1 - |x|) = 2 pi (1/2 - 1/3) = pi/3."""
    return il_constant(2, Fraction(1, 3), dist_in_pi_units=True)


# ---------------------------------------------------------------- growth fitting

@dataclass(frozen=True)
class GrowthFit:
    two_beta: float
    k: float
    intercept: float
    rms_residual: float
    samples: int


def growth_fit(r: Sequence[float], norm_sq: Sequence[float]) -> GrowthFit:
    """Least squares of log|xi|^2 on (1, log r, log|log r|)."""
    r = np.asarray(r, dtype=float)
    y = np.asarray(norm_sq, dtype=float)
    if r.shape != y.shape or r.ndim != 1:
        raise InputError("radii and samples must be matching 1-d sequences")
    if len(r) < 20:
        raise InsufficientSamplesError(f"growth_fit needs at least 20 samples, got {len(r)}")
    if np.any(r <= 0) or r.max() > 0.01:
        raise InputError("samples must lie in (0, 0.01]")
    if np.any(y <= 0):
        raise InputError("norms must be positive")
    design = np.column_stack([np.ones_like(r), np.log(r), np.log(np.abs(np.log(r)))])
    coef, *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
    resid = np.log(y) - design @ coef
    return GrowthFit(float(coef[1]), float(coef[2]), float(coef[0]),
                     float(np.sqrt(np.mean(resid ** 2))), len(r))


def log_grid(r_min: float = 1e-8, r_max: float = 1e-2, count: int = 64) -> np.ndarray:
    return np.geomspace(r_min, r_max, count)


# ---------------------------------------------------------------- frame model

@dataclass(frozen=True)
class FrameModel:
    """Gram matrix H(r) = D^{1/2} (I + E(r)) D^{1/2} of a synthetic adapted frame.

    D = diag(r^{2 beta_i} |ln r|^{k_i}) follows growth_exponents; E(r) is a
    symmetric perturbation decaying like ``coupling``/|ln r|, so each |xi_i|^2
    is only comparable to r^{2 beta_i} |ln r|^{k_i}.
    """

    betas: tuple
    weights: tuple
    coupling: np.ndarray  # symmetric, spectral radius <= strength

    @classmethod
    def from_local_type(cls, t: LocalType, strength: float = 0.2, seed: int = 0) -> "FrameModel":
        betas, weights = [], []
        for ge in growth_exponents(t):
            betas += [float(ge.beta)] * ge.multiplicity
            weights += [ge.k] * ge.multiplicity
        n = len(betas)
        rng = np.random.default_rng(seed)
        e = rng.uniform(-1, 1, (n, n))
        e = (e + e.T) / 2
        radius = float(np.abs(np.linalg.eigvalsh(e)).max()) if n else 0.0
        if radius:
            e *= strength / radius
        return cls(tuple(betas), tuple(weights), e)

    def model_diagonal(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)[..., None]
        u = np.log(1.0 / r)
        return r ** (2 * np.array(self.betas)) * u ** np.array(self.weights, dtype=float)

    def gram(self, r: float) -> np.ndarray:
        d = np.sqrt(self.model_diagonal(r))
        u = math.log(1.0 / r)
        return d[:, None] * (np.eye(len(self.betas)) + self.coupling / u) * d[None, :]

    def vector_norm_sq(self, index: int, r) -> np.ndarray:
        """|xi_index|^2 at the radii r."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        u = np.log(1.0 / r)
        return self.model_diagonal(r)[:, index] * (1.0 + self.coupling[index, index] / u)

    def adapted_constants(self, radii: Sequence[float]) -> tuple:
        """(c, C) with c sum|a_i|^2|xi_i|^2 <= |sum a_i xi_i|^2 <= C sum|a_i|^2|xi_i|^2 on ``radii``."""
        lo, hi = math.inf, 0.0
        for r in radii:
            h = self.gram(float(r))
            s = 1.0 / np.sqrt(np.diag(h))
            ev = np.linalg.eigvalsh(s[:, None] * h * s[None, :])
            lo, hi = min(lo, float(ev.min())), max(hi, float(ev.max()))
        return lo, hi

    def combination_ratio(self, coeffs: np.ndarray, r: float) -> float:
        """|sum a_i xi_i|^2 / sum |a_i|^2 |xi_i|^2 at radius r."""
        h = self.gram(r)
        num = float(np.real(np.conj(coeffs) @ h @ coeffs))
        den = float(np.sum(np.abs(coeffs) ** 2 * np.diag(h)))
        return num / den


def frame_growth_fit(t: LocalType, index: int = 0, r_min: float = 1e-8, r_max: float = 1e-2,
                     count: int = 64, seed: int = 0) -> GrowthFit:
    """Fit the growth of frame vector ``index`` of the model built from ``t``."""
    model = FrameModel.from_local_type(t, seed=seed)
    r = log_grid(r_min, r_max, count)
    return growth_fit(r, model.vector_norm_sq(index, r))


# ---------------------------------------------------------------- Wirtinger

@dataclass(frozen=True)
class WirtingerEstimate:
    constant: float  # sup |g - mean g| / |dg| over the trial space
    trial_space_dim: int
    max_mode: int
    degree: int
    sampled_max: float  # largest ratio seen on random trial functions


def _mode_matrices(n: int, degree: int):
    """Mass and stiffness on span{r^{|n|+2j}} e^{in theta} over the unit disk."""
    exps = [abs(n) + 2 * j for j in range(degree + 1)]
    size = len(exps)
    mass = np.empty((size, size))
    stiff = np.empty((size, size))
    for i, a in enumerate(exps):
        for j, b in enumerate(exps):
            s = a + b
            mass[i, j] = 2 * math.pi / (s + 2)
            stiff[i, j] = 2 * math.pi * (a * b + n * n) / s if s > 0 else 0.0
    return exps, mass, stiff


def _mean_zero_block(mass, stiff):
    # n = 0 block: constants are the stiffness kernel; restrict to the mass-orthogonal complement
    c = mass[:, 0] / mass[0, 0]
    basis = np.eye(mass.shape[0])[:, 1:] - np.outer(np.eye(mass.shape[0])[:, 0], c[1:])
    return basis.T @ mass @ basis, basis.T @ stiff @ basis


def wirtinger_constant(max_mode: int = 4, degree: int = 6, trials: int = 200, seed: int = 0) -> WirtingerEstimate:
    """Rayleigh-Ritz estimate of sup |g - mean|_2 / |dg|_2 on the Euclidean unit disk."""
    lam = math.inf
    dim = 0
    blocks = {}
    for n in range(-max_mode, max_mode + 1):
        _exps, mass, stiff = _mode_matrices(n, degree)
        if n == 0:
            mass, stiff = _mean_zero_block(mass, stiff)
        blocks[n] = (mass, stiff)
        dim += mass.shape[0]
        chol = np.linalg.cholesky(mass)
        inv = np.linalg.inv(chol)
        ev = np.linalg.eigvalsh(inv @ stiff @ inv.T)
        lam = min(lam, float(ev.min()))
    rng = np.random.default_rng(seed)
    sampled = 0.0
    for _ in range(trials):
        num = den = 0.0
        for mass, stiff in blocks.values():
            c = rng.normal(size=mass.shape[0]) + 1j * rng.normal(size=mass.shape[0])
            num += float(np.real(np.conj(c) @ mass @ c))
            den += float(np.real(np.conj(c) @ stiff @ c))
        sampled = max(sampled, math.sqrt(num / den))
    return WirtingerEstimate(1.0 / math.sqrt(lam), dim, max_mode, degree, sampled)
