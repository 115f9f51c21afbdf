"""Local vanishing on the punctured disk for a full local type.

The bundle carries an adapted frame xi_1..xi_n (one Jordan basis per
alpha-part); the connection acts as

    D(omega (x) xi_i) = (d omega + beta dz/z ^ omega) (x) xi_i + (1/2 pi i) dz/z ^ omega (x) N xi_i,

and the norm is the sum of the component norms.  Closed forms are reduced
weight by weight (non-unipotent parts first, each chain from the top),
solving each graded piece and clearing the leftover channels through N.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from ..config import DEFAULT
from ..weights import LocalType
from .forms import ModeForm, channel_weight, d_twisted, dlog_wedge, retag, weighted_norm
from .radial import DEFAULT_QUADRATURE, LogMonomialSum, Quadrature, weighted_integral_diverges
from .solvers import AREA_KM1, RADIAL_K1, RESIDUE, solve_mode, solve_mode2

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class FrameVector:
    beta: Fraction
    k: int  # weight, so |xi|^2 ~ r^{2beta} |ln r|^k
    chain: int
    position: int  # 0 = top of its Jordan chain


@dataclass(frozen=True)
class Frame:
    vectors: tuple
    nxt: tuple  # index of N xi_i, or None

    @classmethod
    def from_local_type(cls, t: LocalType) -> "Frame":
        vecs, nxt = [], []
        chain = 0
        # unipotent part last, matching the reduction order
        parts = sorted(t.parts, key=lambda p: (p[0] == 0, float(p[0])))
        for alpha, blocks in parts:
            for m in blocks:
                start = len(vecs)
                for pos in range(m):
                    vecs.append(FrameVector(Fraction(alpha), m - 1 - 2 * pos, chain, pos))
                    nxt.append(start + pos + 1 if pos + 1 < m else None)
                chain += 1
        return cls(tuple(vecs), tuple(nxt))

    @property
    def prev(self) -> tuple:
        out = [None] * len(self.vectors)
        for i, j in enumerate(self.nxt):
            if j is not None:
                out[j] = i
        return tuple(out)

    def __len__(self):
        return len(self.vectors)


def zero_form(frame: Frame, degree: int, R: float, n_max: int):
    return [ModeForm(degree, v.beta, v.k, R, {}, n_max) for v in frame.vectors]


def d_full(frame: Frame, forms: list) -> list:
    out = [d_twisted(f) for f in forms]
    for i, j in enumerate(frame.nxt):
        if j is None:
            continue
        coupling = retag(dlog_wedge(forms[i]), k=frame.vectors[j].k).scale(1 / TWO_PI_I)
        out[j] = out[j] + coupling
    return out


def full_norm(forms: list, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    total = 0.0
    for f in forms:
        total += weighted_norm(f, quad).squared
    return math.sqrt(total)


def sub(a: list, b: list) -> list:
    return [x - y for x, y in zip(a, b)]


def _add_mode(form: ModeForm, n: int, coeffs: tuple) -> ModeForm:
    return form + form.like(modes={n: coeffs})


@dataclass(frozen=True)
class Reduction:
    primitive: list
    residual: list
    channels: tuple  # (frame index, channel) pairs that needed the N-coupling
    input_norm: float
    primitive_norm: float
    residual_norm: float

    @property
    def relative_residual(self) -> float:
        return self.residual_norm / self.input_norm if self.input_norm else self.residual_norm

    @property
    def ratio(self) -> float:
        return self.primitive_norm / self.input_norm if self.input_norm else 0.0


def reduce_closed(frame: Frame, eta: list, tol: float = DEFAULT.tol, quad: Quadrature = DEFAULT_QUADRATURE) -> Reduction:
    """Primitive of a closed 1- or 2-form on the full complex by graded reduction."""
    degree = eta[0].degree
    R, n_max = eta[0].R, eta[0].n_max
    prim = zero_form(frame, degree - 1, R, n_max)
    prev = frame.prev
    used = []
    current = list(eta)
    for i, vec in enumerate(frame.vectors):
        comp = current[i]
        if degree == 1:
            sol = solve_mode(comp, tol=tol, quad=quad, with_norms=False)
        else:
            sol = solve_mode2(comp, tol=tol, quad=quad, with_norms=False)
        prim[i] = prim[i] + sol.nu
        if sol.channel == RESIDUE:
            p = prev[i]
            if p is None:
                raise ArithmeticError("residue term on a vector outside the image of N")
            prim[p] = _add_mode(prim[p], 0, (LogMonomialSum.constant(2 * math.pi * sol.g0),))
            used.append((i, sol.channel))
        elif sol.channel == RADIAL_K1:
            j = frame.nxt[i]
            if j is None:
                raise ArithmeticError("radial k=1 term on a vector with N xi = 0")
            g = current[j].mode(0)[1]
            prim[i] = _add_mode(prim[i], 0, (g.scale(2 * math.pi),))
            used.append((i, sol.channel))
        elif sol.channel == AREA_KM1:
            p = prev[i]
            if p is None:
                raise ArithmeticError("area term at k=-1 on a vector outside the image of N")
            h0 = comp.mode(0)[0]
            prim[p] = _add_mode(prim[p], 0, (h0.scale(-2 * math.pi), LogMonomialSum()))
            used.append((i, sol.channel))
        current = sub(eta, d_full(frame, prim))
    residual = current
    return Reduction(prim, residual, tuple(used), full_norm(eta, quad), full_norm(prim, quad),
                     full_norm(residual, quad))


# ---------------------------------------------------------------- random closed forms

def _finite(form: ModeForm) -> bool:
    from .forms import CHANNELS

    for idx, ch in enumerate(CHANNELS[form.degree]):
        p, q = channel_weight(form.degree, ch, form.beta, form.k)
        for cs in form.modes.values():
            sq = cs[idx].abs2()
            if weighted_integral_diverges([k for k, v in sq.items() if v != 0], p, q):
                return False
    return True


def _random_coeff(rng: random.Random) -> complex:
    return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))


def _random_radial(rng: random.Random, base: Fraction, allow_base: bool, terms: int = 2) -> LogMonomialSum:
    shifts = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]
    if allow_base:
        shifts = [Fraction(0)] + shifts
    out = LogMonomialSum()
    for _ in range(rng.randint(1, terms)):
        a = base + rng.choice(shifts)
        b = rng.choice([0, 0, 1])
        out = out + LogMonomialSum.monomial(_random_coeff(rng), a, b)
    return out


def _random_modes(rng: random.Random, n_max: int, decay: float = 0.5, count: int = 3):
    modes = {0}
    for _ in range(count):
        modes.add(rng.randint(-min(n_max, 4), min(n_max, 4)))
    return sorted(modes)


def random_zero_form(frame: Frame, R: float, rng: random.Random, n_max: int = 8, decay: float = 0.5) -> list:
    """Random square-integrable 0-forms whose full differential is square integrable too."""
    while True:
        forms = []
        for v in frame.vectors:
            modes = {}
            for n in _random_modes(rng, n_max):
                amp = decay ** abs(n)
                modes[n] = (_random_radial(rng, -v.beta, allow_base=True).scale(amp),)
            forms.append(ModeForm(0, v.beta, v.k, R, modes, n_max))
        forms = [_prune(f) for f in forms]
        d = d_full(frame, forms)
        if all(_finite(f) for f in forms) and all(_finite(f) for f in d):
            return forms


def _prune(form: ModeForm) -> ModeForm:
    """Drop modes that are not square integrable."""
    keep = {}
    for n, cs in form.modes.items():
        single = form.like(modes={n: cs})
        if _finite(single) and _finite(d_twisted(single)) and _finite(dlog_wedge(single)):
            keep[n] = cs
    return form.like(modes=keep)


def random_closed_1form(frame: Frame, R: float, rng: random.Random, n_max: int = 8) -> list:
    """D of a random admissible 0-form: closed, square integrable, all channels exercised."""
    return d_full(frame, random_zero_form(frame, R, rng, n_max))


def random_2form(frame: Frame, R: float, rng: random.Random, n_max: int = 8, decay: float = 0.5) -> list:
    """Random square-integrable 2-form (every 2-form on a surface is closed)."""
    forms = []
    for v in frame.vectors:
        modes = {}
        for n in _random_modes(rng, n_max):
            amp = decay ** abs(n)
            cand = ModeForm(2, v.beta, v.k, R, {n: (_random_radial(rng, -v.beta - 1, allow_base=False).scale(amp),)},
                            n_max)
            if _finite(cand):
                modes[n] = cand.mode(n)
        forms.append(ModeForm(2, v.beta, v.k, R, modes, n_max))
    return forms


def random_graded_closed_1form(beta, k: int, R: float, rng: random.Random, n_max: int = 8) -> ModeForm:
    """Random closed square-integrable 1-form on a single graded piece."""
    frame = Frame((FrameVector(Fraction(beta), k, 0, 0),), (None,))
    eta = random_closed_1form(frame, R, rng, n_max)[0]
    if Fraction(beta) == 0:
        f0 = _random_radial(rng, Fraction(-1), allow_base=False)
        extra = eta.like(modes={0: (f0, LogMonomialSum())})
        if _finite(extra):
            eta = eta + extra
        if k < -1:
            eta = eta + eta.like(modes={0: (LogMonomialSum(), LogMonomialSum.constant(_random_coeff(rng)))})
    return eta


# ---------------------------------------------------------------- the probe

@dataclass(frozen=True)
class ProbeReport:
    local_type: LocalType
    trials: int
    degree1_max_residual: float
    degree2_max_residual: float
    max_ratio: float
    channels_used: tuple
    success: bool
    tolerance: float
    R: float
    n_max: int


def local_vanishing_probe(t: LocalType, trials: int = 50, seed: int = 0, R: float = 0.5, n_max: int = 8,
                          tol: float = DEFAULT.tol, quad: Quadrature = DEFAULT_QUADRATURE,
                          zero_forms: bool = False) -> ProbeReport:
    """Reduce random closed 1- and 2-forms compatible with ``t`` and report residuals and ratios."""
    frame = Frame.from_local_type(t)
    res1 = res2 = ratio = 0.0
    channels = set()
    ok = True
    for trial in range(trials):
        rng = random.Random(seed * 1_000_003 + trial)
        if zero_forms:
            eta1, eta2 = zero_form(frame, 1, R, n_max), zero_form(frame, 2, R, n_max)
        else:
            eta1 = random_closed_1form(frame, R, rng, n_max)
            eta2 = random_2form(frame, R, rng, n_max)
        for eta, deg in ((eta1, 1), (eta2, 2)):
            red = reduce_closed(frame, eta, tol, quad)
            rel = red.relative_residual
            if deg == 1:
                res1 = max(res1, rel)
            else:
                res2 = max(res2, rel)
            ratio = max(ratio, red.ratio)
            channels.update(ch for _, ch in red.channels)
            if not (rel <= tol and math.isfinite(red.primitive_norm)):
                ok = False
    return ProbeReport(t, trials, res1, res2, ratio, tuple(sorted(channels)), ok, tol, R, n_max)
