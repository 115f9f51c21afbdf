"""Radial coefficient functions  sum_j c_j r^{a_j} u^{b_j}  with u = ln(1/r).

The class is closed under d/dr, multiplication by powers of r and u, and
radial primitives, which is all the Fourier-mode constructions need.
Weighted integrals over (0, R] are evaluated after the substitution
u = U e^v (U = ln 1/R) by composite Gauss-Legendre with panel doubling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

Exponent = Union[Fraction, int]


def as_exponent(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    f = Fraction(float(x)).limit_denominator(10 ** 6)
    if abs(float(f) - float(x)) > 1e-12:
        raise ValueError(f"exponent {x!r} is not close to a rational with small denominator")
    return f


class LogMonomialSum:
    """Immutable sum of terms c * r**a * u**b keyed by (a, b)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for (a, b), c in (terms or {}).items():
            b = int(b)
            if b < 0:
                raise ValueError("log powers must be non-negative")
            key = (as_exponent(a), b)
            c = complex(c)
            if c != 0:
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: v for k, v in clean.items() if v != 0}

    @classmethod
    def monomial(cls, c, a=0, b=0) -> "LogMonomialSum":
        return cls({(a, b): c})

    @classmethod
    def zero(cls) -> "LogMonomialSum":
        return cls()

    @classmethod
    def constant(cls, c) -> "LogMonomialSum":
        return cls({(0, 0): c})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LogMonomialSum(out)

    def __neg__(self):
        return LogMonomialSum({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LogMonomialSum":
        return LogMonomialSum({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, LogMonomialSum):
            out = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    key = (a1 + a2, b1 + b2)
                    out[key] = out.get(key, 0) + c1 * c2
            return LogMonomialSum(out)
        return self.scale(other)

    __rmul__ = __mul__

    def mul_r(self, p) -> "LogMonomialSum":
        p = as_exponent(p)
        return LogMonomialSum({(a + p, b): c for (a, b), c in self.terms.items()})

    def mul_u(self, q: int = 1) -> "LogMonomialSum":
        return LogMonomialSum({(a, b + q): c for (a, b), c in self.terms.items()})

    def conj(self) -> "LogMonomialSum":
        return LogMonomialSum({k: v.conjugate() for k, v in self.terms.items()})

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.terms.values())

    def max_coeff(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def derivative(self) -> "LogMonomialSum":
        """d/dr, using du/dr = -1/r."""
        out = {}
        for (a, b), c in self.terms.items():
            if a != 0:
                out[(a - 1, b)] = out.get((a - 1, b), 0) + a * c
            if b > 0:
                out[(a - 1, b - 1)] = out.get((a - 1, b - 1), 0) - b * c
        return LogMonomialSum(out)

    def antiderivative(self) -> "LogMonomialSum":
        """Some primitive F with F' = self."""
        out = {}
        for (a, b), c in self.terms.items():
            if a == -1:
                key = (Fraction(0), b + 1)
                out[key] = out.get(key, 0) - c / (b + 1)
                continue
            s = a + 1
            for j in range(b + 1):
                coef = math.factorial(b) / (math.factorial(j) * float(s) ** (b - j + 1))
                key = (s, j)
                out[key] = out.get(key, 0) + c * coef
        return LogMonomialSum(out)

    def integrable_at_zero(self) -> bool:
        """Whether the primitive from 0 converges (every exponent above -1)."""
        return all(a > -1 for (a, _b) in self.terms)

    def primitive_from_zero(self) -> "LogMonomialSum":
        """r -> integral_0^r of self."""
        if not self.integrable_at_zero():
            raise ValueError("integral from 0 diverges")
        return self.antiderivative()  # every term of F vanishes at r = 0

    def primitive_to(self, R: float) -> "LogMonomialSum":
        """r -> -integral_r^R of self."""
        f = self.antiderivative()
        return f - LogMonomialSum.constant(f(R))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        u = np.log(1.0 / r)
        out = np.zeros(r.shape, dtype=complex)
        for (a, b), c in self.terms.items():
            out = out + c * r ** float(a) * u ** b
        return out if out.shape else complex(out)

    def eval_u(self, u):
        """Evaluate at r = exp(-u); u may be an array."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=complex)
        for (a, b), c in self.terms.items():
            out = out + c * np.exp(-float(a) * u) * u ** b
        return out

    def abs2(self) -> dict:
        """|self|^2 as {(A, B): real coefficient}."""
        out = {}
        items = list(self.terms.items())
        for (a1, b1), c1 in items:
            for (a2, b2), c2 in items:
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, 0.0) + (c1 * c2.conjugate()).real
        return out

    def leading(self):
        """Most singular term at r -> 0: smallest r-power, then largest log power."""
        if not self.terms:
            return None
        return min(self.terms, key=lambda k: (k[0], -k[1]))

    def __eq__(self, other):
        return isinstance(other, LogMonomialSum) and (self - other).is_zero()

    def close_to(self, other, tol: float) -> bool:
        return (self - other).is_zero(tol)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self.terms.items()):
            parts.append(f"({c:.6g})r^{a}u^{b}")
        return " + ".join(parts)


def weighted_integral_diverges(sq_terms: Iterable, p: Fraction, q: int) -> bool:
    """Whether integral_0^R sum C r^A u^B * r^p u^q dr diverges at r = 0.

    ``sq_terms`` are the exponent pairs of a non-negative integrand |F|^2 whose
    leading term has positive coefficient, so only that term decides.
    """
    keys = list(sq_terms)
    if not keys:
        return False
    a, b = min(keys, key=lambda k: (k[0], -k[1]))
    s = a + p + 1
    if s < 0:
        return True
    if s == 0:
        return b + q >= -1
    return False


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _composite(f, lo: float, hi: float, panels: int) -> float:
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(w, f(x)))


@dataclass(frozen=True)
class Quadrature:
    """Controls for the u-substitution quadrature."""

    base_panels: int = 8
    rel_tol: float = 1e-10
    max_doublings: int = 14
    tail: float = 1e-18

    def doubled(self) -> "Quadrature":
        return Quadrature(self.base_panels * 2, self.rel_tol, self.max_doublings, self.tail)


DEFAULT_QUADRATURE = Quadrature()


def integrate_u(integrand_u, R: float, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """integral_0^R F dr given F(r) dr written as integrand_u(u) du on u in [U, inf).

    Substituting u = U e^v turns both exponential and algebraic decay into
    decay in v; the upper limit in v grows until the tail is negligible.
    """
    U = math.log(1.0 / R)
    if U <= 0:
        raise ValueError("radius must lie in (0, 1)")

    def g(v):
        u = U * np.exp(v)
        return integrand_u(u) * u

    probe_v = np.linspace(0.0, 2.0, 41)
    scale = float(np.max(np.abs(g(probe_v)))) or 1.0
    vmax = 2.0
    while vmax < 200.0:
        tail_v = np.linspace(vmax, vmax + 1.0, 9)
        if float(np.max(np.abs(g(tail_v)))) <= quad.tail * scale:
            break
        scale = max(scale, float(np.max(np.abs(g(tail_v)))))
        vmax *= 1.5
    panels = quad.base_panels
    prev = _composite(g, 0.0, vmax, panels)
    for _ in range(quad.max_doublings):
        panels *= 2
        cur = _composite(g, 0.0, vmax, panels)
        if abs(cur - prev) <= quad.rel_tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


def weighted_square_integral(funcs: Iterable[LogMonomialSum], p: Fraction, q: int, R: float,
                             quad: Quadrature = DEFAULT_QUADRATURE):
    """sum_f integral_0^R |f|^2 r^p u^q dr, or math.inf when any term diverges."""
    p = as_exponent(p)
    collected = {}
    for f in funcs:
        sq = f.abs2()
        if weighted_integral_diverges([k for k, v in sq.items() if v != 0], p, q):
            return math.inf
        for k, v in sq.items():
            collected[k] = collected.get(k, 0.0) + v
    collected = {k: v for k, v in collected.items() if v != 0}
    if not collected:
        return 0.0
    keys = list(collected)
    A = np.array([float(a) for a, _ in keys])
    B = np.array([b for _, b in keys], dtype=float)
    C = np.array([collected[k] for k in keys])

    def integrand(u):
        # r^(A+p) u^(B+q) dr = e^{-(A+p+1)u} u^(B+q) du
        u = np.asarray(u)[..., None]
        vals = C * np.exp(-(A + float(p) + 1.0) * u) * u ** (B + q)
        return vals.sum(axis=-1)

    return max(integrate_u(integrand, R, quad), 0.0)
