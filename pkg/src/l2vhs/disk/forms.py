"""Fourier-mode forms on the punctured disk with values in a line with growth (beta, k).

A form of degree d is stored as a map  mode n -> channel coefficients:

* degree 0: (h,)           h(r) e^{in theta}
* degree 1: (f, g)         (f dr + g dtheta) e^{in theta}
* degree 2: (h,)           h dr ^ dtheta e^{in theta}

Norms are taken for the Poincare metric |dz|^2 / (|z| ln|z|)^2 against a
section with |xi|^2 = r^{2 beta} |ln r|^k.  With u = ln(1/r):

* 0-forms:  r^{2beta-1} u^{k-2} dr dtheta
* dr:       r^{2beta+1} u^k
* dtheta:   r^{2beta-1} u^k
* dr^dtheta r^{2beta+1} u^{k+2}

The twisted differential is D = d + beta dz/z ^ (the section xi has
connection form beta dz/z), which gives the closedness condition
g_n' + (beta/r) g_n = i (n + beta) f_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

from .radial import DEFAULT_QUADRATURE, LogMonomialSum, Quadrature, as_exponent, weighted_square_integral

CHANNELS = {0: ("h",), 1: ("dr", "dtheta"), 2: ("area",)}


def channel_weight(degree: int, channel: str, beta: Fraction, k: int):
    """(p, q) with measure r^p u^q dr (per unit of dtheta)."""
    b2 = 2 * beta
    if degree == 0:
        return b2 - 1, k - 2
    if channel == "dr":
        return b2 + 1, k
    if channel == "dtheta":
        return b2 - 1, k
    return b2 + 1, k + 2


@dataclass(frozen=True)
class WeightedNorm:
    """``value`` is the L2 norm; ``squared`` is the weighted integral itself."""

    squared: float
    measure: str

    @property
    def finite(self) -> bool:
        return math.isfinite(self.squared)

    @property
    def value(self) -> float:
        return math.sqrt(self.squared) if self.finite else math.inf


def _zero_tuple(degree):
    return tuple(LogMonomialSum() for _ in CHANNELS[degree])


@dataclass(frozen=True, eq=False)
class ModeForm:
    degree: int
    beta: Fraction
    k: int
    R: float
    modes: Dict[int, tuple] = field(default_factory=dict)
    n_max: int = 32
    tag: str = ""

    def __post_init__(self):
        if self.degree not in CHANNELS:
            raise ValueError("degree must be 0, 1 or 2")
        if not 0 < self.R < 1:
            raise ValueError("radius must lie in (0, 1)")
        object.__setattr__(self, "beta", as_exponent(self.beta))
        width = len(CHANNELS[self.degree])
        clean = {}
        for n, coeffs in self.modes.items():
            coeffs = tuple(coeffs)
            if len(coeffs) != width:
                raise ValueError(f"degree {self.degree} forms carry {width} channel(s)")
            if abs(n) > self.n_max:
                continue  # truncation
            if not all(c.is_zero() for c in coeffs):
                clean[int(n)] = coeffs
        object.__setattr__(self, "modes", clean)

    def like(self, degree=None, modes=None) -> "ModeForm":
        return ModeForm(self.degree if degree is None else degree, self.beta, self.k, self.R,
                        modes if modes is not None else {}, self.n_max, self.tag)

    def mode(self, n: int) -> tuple:
        return self.modes.get(n, _zero_tuple(self.degree))

    def __add__(self, other: "ModeForm") -> "ModeForm":
        _check_compatible(self, other)
        out = dict(self.modes)
        for n, cs in other.modes.items():
            base = out.get(n, _zero_tuple(self.degree))
            out[n] = tuple(a + b for a, b in zip(base, cs))
        return self.like(modes=out)

    def scale(self, c) -> "ModeForm":
        return self.like(modes={n: tuple(x.scale(c) for x in cs) for n, cs in self.modes.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(x.is_zero(tol) for cs in self.modes.values() for x in cs)

    def max_coeff(self) -> float:
        return max((x.max_coeff() for cs in self.modes.values() for x in cs), default=0.0)


def _check_compatible(a: ModeForm, b: ModeForm):
    if (a.degree, a.beta, a.k, a.R) != (b.degree, b.beta, b.k, b.R):
        raise ValueError("forms live on different pieces or have different degrees")


def weighted_norm(form: ModeForm, quad: Quadrature = DEFAULT_QUADRATURE) -> WeightedNorm:
    """Weighted L2 norm; 2 pi sum over modes of the radial integrals (Parseval)."""
    total = 0.0
    for idx, ch in enumerate(CHANNELS[form.degree]):
        p, q = channel_weight(form.degree, ch, form.beta, form.k)
        funcs = [cs[idx] for cs in form.modes.values()]
        total += weighted_square_integral(funcs, p, q, form.R, quad)
        if math.isinf(total):
            break
    return WeightedNorm(2 * math.pi * total if math.isfinite(total) else math.inf,
                        f"degree {form.degree}, beta={form.beta}, k={form.k}")


def d_twisted(form: ModeForm) -> ModeForm:
    """D = d + beta dz/z ^ on one graded piece, mode by mode."""
    beta = form.beta
    out = {}
    if form.degree == 0:
        for n, (h,) in form.modes.items():
            dr = h.derivative() + h.mul_r(-1).scale(float(beta))
            dth = h.scale(1j * (n + float(beta)))
            out[n] = (dr, dth)
        return form.like(degree=1, modes=out)
    if form.degree == 1:
        for n, (f, g) in form.modes.items():
            area = g.derivative() + g.mul_r(-1).scale(float(beta)) - f.scale(1j * (n + float(beta)))
            out[n] = (area,)
        return form.like(degree=2, modes=out)
    return form.like(degree=2, modes={})  # top degree: D = 0 on surfaces


def dlog_wedge(form: ModeForm) -> ModeForm:
    """dz/z ^ form, with dz/z = dr/r + i dtheta."""
    out = {}
    if form.degree == 0:
        for n, (h,) in form.modes.items():
            out[n] = (h.mul_r(-1), h.scale(1j))
        return form.like(degree=1, modes=out)
    if form.degree == 1:
        for n, (f, g) in form.modes.items():
            out[n] = (g.mul_r(-1) - f.scale(1j),)
        return form.like(degree=2, modes=out)
    return form.like(degree=2, modes={})


def closedness_defect(form: ModeForm) -> float:
    """Largest coefficient of D(form); zero for closed 1-forms."""
    if form.degree != 1:
        return 0.0
    return d_twisted(form).max_coeff()


def retag(form: ModeForm, k: int = None, beta=None) -> ModeForm:
    """Same coefficients viewed on another graded piece."""
    return ModeForm(form.degree, form.beta if beta is None else beta, form.k if k is None else k, form.R,
                    form.modes, form.n_max, form.tag)
