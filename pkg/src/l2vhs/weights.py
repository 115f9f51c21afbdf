"""Local spectral data at a puncture: local types, weight filtrations, growth exponents, lattices."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotNilpotentError
from .numeric import (
    Matrix,
    RotationNumber,
    contains_span,
    eig_unit_circle,
    hstack,
    kernel_matrix,
    nilpotency_index,
    normalize_rotation,
    rank,
)


def _same_rotation(a: RotationNumber, b: RotationNumber, tol: float = 1e-9) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a - b).denominator == 1
    d = float(a) - float(b)
    return abs(d - round(d)) <= tol


def _weights_of_block(m: int):
    return list(range(m - 1, -m, -2))


@dataclass(frozen=True)
class LocalType:
    """Spectral datum: rotation numbers in (-1, 0] with Jordan block sizes."""

    parts: tuple  # of (alpha, blocks) with blocks sorted descending

    def __post_init__(self):
        merged = {}
        order = []
        for alpha, blocks in self.parts:
            a = normalize_rotation(alpha)
            key = next((k for k in order if _same_rotation(k, a)), None)
            if key is None:
                order.append(a)
                merged[a] = []
                key = a
            merged[key].extend(int(b) for b in blocks)
        for k, bl in merged.items():
            if any(b <= 0 for b in bl):
                raise ValueError("block sizes must be positive")
        parts = tuple(sorted(((a, tuple(sorted(merged[a], reverse=True))) for a in order),
                             key=lambda p: float(p[0])))
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, mapping) -> "LocalType":
        items = mapping.items() if hasattr(mapping, "items") else mapping
        return cls(tuple((a, tuple(b)) for a, b in items))

    @property
    def n(self) -> int:
        return sum(sum(b) for _, b in self.parts)

    def blocks_at(self, beta: RotationNumber) -> tuple:
        for a, b in self.parts:
            if _same_rotation(a, beta):
                return b
        return ()

    @property
    def unipotent_blocks(self) -> tuple:
        return self.blocks_at(Fraction(0))

    def as_dict(self):
        return {a: b for a, b in self.parts}


@dataclass(frozen=True)
class WeightFiltration:
    """Increasing filtration W_k(N) centred at 0, stored via an adapted Jordan basis."""

    basis: Matrix  # columns: Jordan basis
    weights: tuple  # weight of each column

    @property
    def n(self) -> int:
        return self.basis.rows

    @property
    def k_min(self) -> int:
        return min(self.weights) if self.weights else 0

    @property
    def k_max(self) -> int:
        return max(self.weights) if self.weights else 0

    def W(self, k: int) -> Matrix:
        idx = [i for i, w in enumerate(self.weights) if w <= k]
        return self.basis.columns(idx)

    def dim(self, k: int) -> int:
        return sum(1 for w in self.weights if w <= k)

    def graded_dims(self) -> dict:
        out = defaultdict(int)
        for w in self.weights:
            out[w] += 1
        return dict(sorted(out.items(), reverse=True))


def jordan_chains(nmat: Matrix):
    """Jordan chains of a nilpotent matrix as lists [v, Nv, ..., N^{m-1}v] of column vectors."""
    q = nilpotency_index(nmat)
    if q == 0:
        return []
    kernels = [nmat.like_zeros(nmat.rows, 0)]
    p = nmat.like_identity()
    for _ in range(q):
        p = p @ nmat
        kernels.append(kernel_matrix(p))
    chains = []
    for j in range(q, 0, -1):
        covered = [kernels[j - 1]]
        for ch in chains:
            if len(ch) > j:
                covered.append(ch[len(ch) - j])
        span = hstack(covered)
        r = rank(span) if span.cols else 0
        for col in kernels[j].column_list():
            trial = hstack([span, col]) if span.cols else col
            rt = rank(trial)
            if rt > r:
                span, r = trial, rt
                chain = [col]
                for _ in range(j - 1):
                    chain.append(nmat @ chain[-1])
                chains.append(chain)
    return chains


def weight_filtration(nmat: Matrix) -> WeightFiltration:
    """W(N) from Jordan chains: a chain of length m carries weights m-1, m-3, ..., 1-m."""
    if nmat.rows != nmat.cols:
        raise NotNilpotentError("weight filtration needs a square matrix")
    chains = jordan_chains(nmat)
    cols, weights = [], []
    for ch in chains:
        m = len(ch)
        for t, v in enumerate(ch):
            cols.append(v)
            weights.append(m - 1 - 2 * t)
    if sum(len(c) for c in chains) != nmat.rows:
        raise NotNilpotentError("Jordan chains do not span the space")
    basis = hstack(cols) if cols else nmat.like_zeros(nmat.rows, 0)
    return WeightFiltration(basis, tuple(weights))


def check_weight_axioms(nmat: Matrix, wf: WeightFiltration) -> bool:
    """Directly verify nesting, N W_k in W_{k-2}, and N^k : Gr_k -> Gr_-k bijective."""
    n = nmat.rows
    if rank(wf.basis) != n:
        return False
    lo, hi = wf.k_min - 2, wf.k_max + 2
    for k in range(lo, hi + 1):
        wk, wkm = wf.W(k), wf.W(k - 1)
        if not contains_span(wk, wkm):
            return False
        if wk.cols and not contains_span(wf.W(k - 2), nmat @ wk):
            return False
    for k in range(0, hi + 1):
        gr_k = wf.dim(k) - wf.dim(k - 1)
        gr_mk = wf.dim(-k) - wf.dim(-k - 1)
        if gr_k != gr_mk:
            return False
        if gr_k == 0:
            continue
        low = wf.W(-k - 1)
        image = (nmat ** k) @ wf.W(k)
        stacked = hstack([low, image]) if low.cols else image
        if rank(stacked) != low.cols + gr_k:
            return False
    return True


def same_filtration(a: WeightFiltration, b: WeightFiltration) -> bool:
    from .numeric import same_span

    lo = min(a.k_min, b.k_min) - 1
    hi = max(a.k_max, b.k_max) + 1
    return all(same_span(a.W(k), b.W(k)) if a.dim(k) or b.dim(k) else True for k in range(lo, hi + 1))


def local_type(t: Matrix, cap: int = 1000, cluster_tol: float = 1e-3) -> LocalType:
    """alpha-parts of T with Jordan block sizes of the nilpotent log of the unipotent factor."""
    parts = eig_unit_circle(t, cap=cap, cluster_tol=cluster_tol)
    return LocalType(tuple((p.alpha, p.blocks) for p in parts))


def pullback_local_type(t: LocalType, n_p: int) -> LocalType:
    """alpha -> n_p alpha mod 1, merging block multisets whose targets coincide."""
    if n_p < 1:
        raise ValueError("n_p must be positive")
    return LocalType(tuple((normalize_rotation(n_p * a), b) for a, b in t.parts))


@dataclass(frozen=True)
class GrowthExponent:
    beta: RotationNumber
    k: int
    multiplicity: int


def growth_exponents(t: LocalType) -> list:
    """Exponents (beta, k) of |xi|^2 ~ |z|^{2 beta} |ln|z||^k, one per Jordan basis vector."""
    out = []
    for a, blocks in t.parts:
        counts = defaultdict(int)
        for m in blocks:
            for k in _weights_of_block(m):
                counts[k] += 1
        for k in sorted(counts, reverse=True):
            out.append(GrowthExponent(a, k, counts[k]))
    return out


def _w_dim(blocks: Iterable[int], k: int) -> int:
    return sum(1 for m in blocks for w in _weights_of_block(m) if w <= k)


@dataclass(frozen=True)
class LatticeDims:
    n: int
    d0: int  # dim M_0 V^0 (preimage of W_0 of the unipotent part)
    d1: int  # dim M_-2 V^-1
    fiber: dict  # beta -> dim of the fibre of V^beta
    weighted: dict  # (k, beta) -> dim of M_k V^beta


def weighted_lattice_dim(t: LocalType, k: int, beta: RotationNumber) -> int:
    """(n - dim of the part with residue beta) + dim W_k of that part."""
    blocks = t.blocks_at(normalize_rotation(beta))
    return t.n - sum(blocks) + _w_dim(blocks, k)


def lattice_dims(t: LocalType, requests: Sequence = ()) -> LatticeDims:
    fiber, weighted = {}, {}
    for req in requests:
        if isinstance(req, tuple):
            k, beta = req
            weighted[(k, beta)] = weighted_lattice_dim(t, k, beta)
        else:
            fiber[req] = t.n  # Deligne lattices are vector bundles of rank n
    return LatticeDims(
        n=t.n,
        d0=weighted_lattice_dim(t, 0, Fraction(0)),
        d1=weighted_lattice_dim(t, -2, Fraction(-1)),
        fiber=fiber,
        weighted=weighted,
    )


def local_h0(t: LocalType) -> int:
    """Sum of dim Gr_k over weights k <= 0 of the unipotent part, i.e. dim W_0(N_0)."""
    return _w_dim(t.unipotent_blocks, 0)
