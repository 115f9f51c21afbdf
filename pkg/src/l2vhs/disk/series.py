"""Holomorphic primitives for the connection z d/dz + beta + N/(2 pi i) and residue reduction.

Sections are written as  sum_s z^s P_s(Nh) e  with Nh = N/(2 pi i) and e the
adapted frame vector, so that

    nabla(z^s Nh^j e) = z^{s-1} (s Nh^j + Nh^{j+1}) e dz.

Coefficients live in Q[Nh]/(Nh^q) when beta and the data are rational,
which makes the differentiation check exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import InconsistentLocalTypeError
from ..numeric import Matrix, contains_span, nilpotency_index, solve_linear
from ..weights import weight_filtration

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class PrimitiveSeries:
    """nu = sum over (s, j) of coeffs[(s, j)] z^s Nh^j e, truncated at Nh^q = 0."""

    beta: Fraction
    q: int  # nilpotency index of N
    coeffs: dict  # (exponent s, j) -> coefficient

    def terms_by_exponent(self):
        out = {}
        for (s, j), c in self.coeffs.items():
            out.setdefault(s, [0] * self.q)
            out[s][j] = c
        return out

    def nabla(self) -> dict:
        """Coefficient polynomials of nabla(nu)/dz, keyed by the exponent s - 1."""
        out = {}
        for s, poly in self.terms_by_exponent().items():
            res = [0] * self.q
            for j, c in enumerate(poly):
                if c == 0:
                    continue
                res[j] += s * c
                if j + 1 < self.q:
                    res[j + 1] += c
            out[s - 1] = res
        return out

    def matrix_coefficient(self, s, nmat: Matrix) -> np.ndarray:
        """sum_j c_{s,j} (N/2 pi i)^j as a complex matrix."""
        nh = nmat.to_numpy() / TWO_PI_I
        out = np.zeros(nh.shape, dtype=complex)
        p = np.eye(nh.shape[0], dtype=complex)
        for j in range(self.q):
            c = self.coeffs.get((s, j), 0)
            out = out + complex(c) * p
            p = p @ nh
        return out


def nabla_primitive_series(a: Sequence, beta, nmat: Matrix = None, q: int = None) -> PrimitiveSeries:
    """Solve nabla nu = (sum_m a_m z^m) z^beta e dz term by term.

    Each z^{m+beta} is inverted by (s + Nh)^{-1} with s = m + 1 + beta, i.e.
    coefficients (-1)^j a_m / s^{j+1} on z^s Nh^j, and the j-sum stops at the
    nilpotency index of N.
    """
    beta = Fraction(beta)
    if not -1 < beta <= 0:
        raise ValueError("beta must lie in (-1, 0]")
    if q is None:
        q = nilpotency_index(nmat) if nmat is not None else 1
    q = max(q, 1)
    coeffs = {}
    for m, am in enumerate(a):
        if am == 0:
            continue
        s = m + 1 + beta
        for j in range(q):
            coeffs[(s, j)] = ((-1) ** j) * am / s ** (j + 1)
    return PrimitiveSeries(beta, q, coeffs)


def verify_primitive(series: PrimitiveSeries, a: Sequence) -> bool:
    """Exact check that nabla(series) reproduces sum a_m z^{m+beta} e dz."""
    got = series.nabla()
    target = {}
    for m, am in enumerate(a):
        if am != 0:
            target[m + series.beta] = [am] + [0] * (series.q - 1)
    keys = set(got) | set(target)
    for key in keys:
        lhs = got.get(key, [0] * series.q)
        rhs = target.get(key, [0] * series.q)
        if any(x != y for x, y in zip(lhs, rhs)):
            return False
    return True


def verify_primitive_matrix(series: PrimitiveSeries, a: Sequence, nmat: Matrix, tol: float = 1e-12) -> bool:
    """Numeric check with the actual matrix: (s + Nh) P_s(Nh) = a_m for every exponent."""
    nh = nmat.to_numpy() / TWO_PI_I
    ident = np.eye(nh.shape[0])
    for m, am in enumerate(a):
        s = m + 1 + series.beta
        p = series.matrix_coefficient(s, nmat)
        lhs = (float(s) * ident + nh) @ p
        if np.abs(lhs - complex(am) * ident).max() > tol * max(1.0, abs(complex(am))):
            return False
    return True


# ---------------------------------------------------------------- residue reduction

@dataclass(frozen=True)
class ResidueReduction:
    residue: object  # a_{-1}
    lift: Matrix  # e~ with N e~ = e (None when no pole)
    correction: complex  # 2 pi i a_{-1}: nabla(correction * e~) = a_{-1} dz/z (x) e
    series: tuple  # pole-free coefficients a_0, a_1, ...


def residue_reduction(coeffs: dict, nmat: Matrix, target: Matrix) -> ResidueReduction:
    """Remove the simple pole of f = sum_{m >= -1} a_m z^m against the unipotent vector ``target``.

    a_{-1} dz/z (x) e equals nabla(2 pi i a_{-1} e~) for N e~ = e.  For a
    target of weight w the lift is sought in W_{w+2} (so W_{-2} targets lift
    into W_0); a target outside the image of N signals an inconsistent local
    type.
    """
    a_m1 = coeffs.get(-1, 0)
    rest = tuple(coeffs.get(m, 0) for m in range(0, max([m for m in coeffs] + [-1]) + 1))
    if a_m1 == 0:
        return ResidueReduction(0, None, 0j, rest)
    wf = weight_filtration(nmat)
    weight = None
    for w in range(wf.k_min, wf.k_max + 1):
        if contains_span(wf.W(w), target):
            weight = w
            break
    space = wf.W(weight + 2) if weight is not None else wf.basis
    y = solve_linear(nmat @ space, target) if space.cols else None
    if y is None:
        raise InconsistentLocalTypeError("pole target is not in the image of N on the expected weight space")
    lift = space @ y
    return ResidueReduction(a_m1, lift, TWO_PI_I * complex(a_m1), rest)
