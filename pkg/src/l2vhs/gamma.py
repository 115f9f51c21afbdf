"""Gamma-dimension bookkeeping for a finite group Gamma.

Modules are Gamma-invariant subspaces of C[Gamma]^m, where Gamma acts on the
left (I_m (x) L_g).  Equivariant maps C[Gamma]^m -> C[Gamma]^m' are right
multiplications by m' x m matrices over the group ring.  The von Neumann
dimension of a module is its complex dimension divided by |Gamma|.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ComplexError
from .groups import FiniteGroup, cyclic_subgroup, regular_rep, right_rep
from .numeric import Matrix, block_diag, contains_span, hstack, kernel_matrix, rank, vstack


def left_action(group: FiniteGroup, g: int, m: int, exact: bool = True) -> Matrix:
    return Matrix.identity(m, exact).kron(regular_rep(group, g, exact))


def right_mult(group: FiniteGroup, coeffs: Sequence[Sequence[dict]], exact: bool = True) -> Matrix:
    """Equivariant map x -> x.a for an m' x m matrix a of group-ring elements {h: coefficient}.

    Output component i is sum_j x_j a_ij, each product taken in C[Gamma].
    """
    n = group.order
    rows = len(coeffs)
    cols = len(coeffs[0]) if rows else 0
    zero = Fraction(0) if exact else 0.0
    grid = [[zero] * (cols * n) for _ in range(rows * n)]
    for i in range(rows):
        for j in range(cols):
            for h, c in coeffs[i][j].items():
                c = Fraction(c) if exact else complex(c)
                for x in range(n):
                    grid[i * n + group.mul(x, h)][j * n + x] += c
    return Matrix.from_rows(grid, exact)


def is_equivariant(group: FiniteGroup, mat: Matrix, m_src: int, m_dst: int) -> bool:
    exact = mat.exact
    for g in group.elements():
        if not (mat @ left_action(group, g, m_src, exact)).equals(left_action(group, g, m_dst, exact) @ mat):
            return False
    return True


def column_space(mat: Matrix) -> Matrix:
    """Columns of ``mat`` forming a basis of its column space (greedy, left to right)."""
    chosen = []
    r = 0
    for j in range(mat.cols):
        trial = chosen + [j]
        rt = rank(mat.columns(trial))
        if rt > r:
            chosen, r = trial, rt
    return mat.columns(chosen)


@dataclass(frozen=True, eq=False)
class GammaModule:
    group: FiniteGroup
    m: int  # ambient C[Gamma]^m
    basis: Matrix  # columns span the submodule

    def __post_init__(self):
        if self.basis.rows != self.m * self.group.order:
            raise ComplexError("basis vectors do not live in C[Gamma]^m")
        if self.basis.cols and rank(self.basis) != self.basis.cols:
            raise ComplexError("module basis is not linearly independent")
        exact = self.basis.exact
        for g in self.group.elements():
            if self.basis.cols and not contains_span(self.basis, left_action(self.group, g, self.m, exact) @ self.basis):
                raise ComplexError("subspace is not Gamma-invariant")

    @property
    def dim(self) -> int:
        return self.basis.cols

    @classmethod
    def free(cls, group: FiniteGroup, m: int, exact: bool = True) -> "GammaModule":
        return cls(group, m, Matrix.identity(m * group.order, exact))

    @classmethod
    def zero(cls, group: FiniteGroup, m: int = 1, exact: bool = True) -> "GammaModule":
        return cls(group, m, Matrix.zeros(m * group.order, 0, exact))

    @classmethod
    def from_projection(cls, group: FiniteGroup, m: int, proj: Matrix) -> "GammaModule":
        if not (proj @ proj).equals(proj):
            raise ComplexError("projection is not idempotent")
        if not is_equivariant(group, proj, m, m):
            raise ComplexError("projection is not Gamma-equivariant")
        return cls(group, m, kernel_matrix(proj.like_identity() - proj))

    @classmethod
    def span(cls, group: FiniteGroup, m: int, vectors: Matrix) -> "GammaModule":
        """Smallest submodule containing the given columns."""
        exact = vectors.exact
        translates = [left_action(group, g, m, exact) @ vectors for g in group.elements()]
        return cls(group, m, column_space(hstack(translates)))


def vn_dim(module: GammaModule) -> Fraction:
    return Fraction(module.dim, module.group.order)


def coset_module(group: FiniteGroup, h: int, exact: bool = True) -> GammaModule:
    """l^2(Gamma/H) for H = <h>: functions on Gamma constant on each left coset xH."""
    n = group.order
    sub = cyclic_subgroup(group, h)
    seen, cols = set(), []
    for x in group.elements():
        if x in seen:
            continue
        coset = {group.mul(x, y) for y in sub}
        seen |= coset
        cols.append([1 if z in coset else 0 for z in range(n)])
    return GammaModule(group, 1, Matrix.from_rows(cols, exact).T)


def averaging_idempotent(group: FiniteGroup, h: int, exact: bool = True) -> Matrix:
    """Right multiplication by e_H = |H|^-1 sum_{y in H} y; an equivariant projection onto l^2(Gamma/H)."""
    sub = cyclic_subgroup(group, h)
    c = Fraction(1, len(sub)) if exact else 1.0 / len(sub)
    return right_mult(group, [[{y: c for y in sub}]], exact)


def kernel_module(group: FiniteGroup, mat: Matrix, source: GammaModule) -> GammaModule:
    k = kernel_matrix(mat @ source.basis)
    return GammaModule(group, source.m, source.basis @ k if k.cols else source.basis.like_zeros(source.basis.rows, 0))


def image_module(group: FiniteGroup, mat: Matrix, source: GammaModule, m_dst: int) -> GammaModule:
    img = mat @ source.basis
    return GammaModule(group, m_dst, column_space(img) if img.cols else img)


@dataclass(frozen=True, eq=False)
class GammaComplex:
    """C^start -> C^{start+1} -> ... with differentials acting on the ambient free modules."""

    modules: tuple
    differentials: tuple  # differentials[i]: ambient(modules[i]) -> ambient(modules[i+1])
    start: int = 0

    def __post_init__(self):
        mods, ds = tuple(self.modules), tuple(self.differentials)
        object.__setattr__(self, "modules", mods)
        object.__setattr__(self, "differentials", ds)
        if len(ds) != max(len(mods) - 1, 0):
            raise ComplexError("need one differential between consecutive modules")
        for i, d in enumerate(ds):
            src, dst = mods[i], mods[i + 1]
            if d.shape != (dst.m * dst.group.order, src.m * src.group.order):
                raise ComplexError(f"differential {i} has the wrong shape")
            if not is_equivariant(src.group, d, src.m, dst.m):
                raise ComplexError(f"differential {i} is not Gamma-equivariant")
            img = d @ src.basis
            if img.cols and not img.is_zero() and not contains_span(dst.basis, img):
                raise ComplexError(f"differential {i} leaves the target module")
        for i in range(len(ds) - 1):
            if not (ds[i + 1] @ ds[i] @ mods[i].basis).is_zero():
                raise ComplexError(f"d o d != 0 at degree {self.start + i}")

    @property
    def group(self) -> FiniteGroup:
        return self.modules[0].group

    @property
    def degrees(self):
        return range(self.start, self.start + len(self.modules))

    def module(self, n: int):
        i = n - self.start
        return self.modules[i] if 0 <= i < len(self.modules) else None

    def differential(self, n: int):
        i = n - self.start
        return self.differentials[i] if 0 <= i < len(self.differentials) else None

    def euler(self) -> Fraction:
        return sum((vn_dim(self.module(n)) if n % 2 == 0 else -vn_dim(self.module(n)) for n in self.degrees), Fraction(0))


def complex_cohomology_dims(c: GammaComplex) -> list:
    """Gamma-dimensions of ker/im in each degree."""
    order = c.group.order
    out = []
    for idx, n in enumerate(c.degrees):
        mod = c.modules[idx]
        d_out = c.differential(n)
        rank_out = rank(d_out @ mod.basis) if d_out is not None and mod.dim else 0
        prev = c.module(n - 1)
        d_in = c.differential(n - 1)
        rank_in = rank(d_in @ prev.basis) if d_in is not None and prev.dim else 0
        out.append(Fraction(mod.dim - rank_out - rank_in, order))
    return out


def check_chain_map(src: GammaComplex, dst: GammaComplex, maps: dict) -> None:
    """maps[n]: ambient(src^n) -> ambient(dst^n); require d f = f d on the modules."""
    for n in set(src.degrees) | set(dst.degrees):
        f = maps.get(n)
        s = src.module(n)
        if f is None or s is None:
            continue
        if not is_equivariant(src.group, f, s.m, dst.module(n).m):
            raise ComplexError(f"chain map component {n} is not equivariant")
        d_dst = dst.differential(n)
        d_src = src.differential(n)
        f_next = maps.get(n + 1)
        lhs = d_dst @ f @ s.basis if d_dst is not None else None
        rhs = f_next @ d_src @ s.basis if (d_src is not None and f_next is not None) else None
        if lhs is not None and rhs is not None:
            diff = lhs - rhs
        else:
            diff = lhs if lhs is not None else rhs
        if diff is not None and not diff.is_zero():
            raise ComplexError(f"not a chain map at degree {n}")


def cone(src: GammaComplex, dst: GammaComplex, maps: dict) -> GammaComplex:
    """cone^n = src^{n+1} (+) dst^n with differential [[-d_src, 0], [f, d_dst]]."""
    check_chain_map(src, dst, maps)
    group = src.group
    exact = src.modules[0].basis.exact
    lo = min(src.start - 1, dst.start)
    hi = max(src.start + len(src.modules) - 2, dst.start + len(dst.modules) - 1)

    def part(c, n):
        mod = c.module(n)
        return mod if mod is not None else GammaModule.zero(group, 1, exact)

    def ambient(mod):
        return mod.m * group.order

    mods = []
    for n in range(lo, hi + 1):
        a, b = part(src, n + 1), part(dst, n)
        mods.append(GammaModule(group, a.m + b.m, block_diag([a.basis, b.basis])))
    ds = []
    for n in range(lo, hi):
        a0, b0 = part(src, n + 1), part(dst, n)
        a1, b1 = part(src, n + 2), part(dst, n + 1)
        d_src = src.differential(n + 1)
        d_src = -d_src if d_src is not None else Matrix.zeros(ambient(a1), ambient(a0), exact)
        f = maps.get(n + 1)
        if f is None or src.module(n + 1) is None or dst.module(n + 1) is None:
            f = Matrix.zeros(ambient(b1), ambient(a0), exact)
        d_dst = dst.differential(n)
        if d_dst is None:
            d_dst = Matrix.zeros(ambient(b1), ambient(b0), exact)
        top = hstack([d_src, Matrix.zeros(ambient(a1), ambient(b0), exact)])
        bottom = hstack([f, d_dst])
        ds.append(vstack([top, bottom]))
    return GammaComplex(tuple(mods), tuple(ds), lo)


def identity_maps(c: GammaComplex) -> dict:
    return {n: c.module(n).basis.like_identity() for n in c.degrees}


def zero_maps(src: GammaComplex, dst: GammaComplex) -> dict:
    out = {}
    for n in src.degrees:
        if dst.module(n) is not None:
            s, d = src.module(n), dst.module(n)
            out[n] = Matrix.zeros(d.m * d.group.order, s.m * s.group.order, s.basis.exact)
    return out


# ---------------------------------------------------------------- random constructions

def random_group_ring_matrix(group: FiniteGroup, rows: int, cols: int, rng: random.Random, density: float = 0.5,
                             exact: bool = True) -> Matrix:
    coeffs = [[{h: rng.randint(-2, 2) for h in group.elements() if rng.random() < density}
               for _ in range(cols)] for _ in range(rows)]
    return right_mult(group, coeffs, exact)


def random_equivariant_iso(group: FiniteGroup, m: int, rng: random.Random, exact: bool = True) -> Matrix:
    """Invertible equivariant map: unitriangular group-ring matrix with unit diagonal."""
    coeffs = [[{group.identity: 1} if i == j else ({h: rng.randint(-2, 2) for h in group.elements()
                                                    if rng.random() < 0.4} if i < j else {})
               for j in range(m)] for i in range(m)]
    return right_mult(group, coeffs, exact)


def random_idempotent(group: FiniteGroup, m: int, rng: random.Random, exact: bool = True) -> Matrix:
    """S D S^-1 with D diagonal over {0, 1, e_H} and S an equivariant isomorphism."""
    n = group.order
    blocks = []
    for _ in range(m):
        kind = rng.choice(["zero", "one", "avg"])
        if kind == "zero":
            blocks.append(Matrix.zeros(n, n, exact))
        elif kind == "one":
            blocks.append(Matrix.identity(n, exact))
        else:
            blocks.append(averaging_idempotent(group, rng.randrange(n), exact))
    d = block_diag(blocks)
    s = random_equivariant_iso(group, m, rng, exact)
    return s @ d @ s.inverse()


def random_complex(group: FiniteGroup, rng: random.Random, dims=(None, None, None), exact: bool = True) -> GammaComplex:
    """Three-term complex C0 -> C1 -> C2 of free modules with d1 d0 = 0."""
    m0, m1, m2 = (d if d is not None else rng.randint(1, 2) for d in dims)
    p = random_idempotent(group, m1, rng, exact)
    x = random_group_ring_matrix(group, m1, m0, rng, exact=exact)
    y = random_group_ring_matrix(group, m2, m1, rng, exact=exact)
    d0 = p @ x
    d1 = y @ (p.like_identity() - p)
    mods = tuple(GammaModule.free(group, m, exact) for m in (m0, m1, m2))
    return GammaComplex(mods, (d0, d1), 0)


def direct_sum(a: GammaComplex, b: GammaComplex) -> GammaComplex:
    if a.start != b.start or len(a.modules) != len(b.modules):
        raise ComplexError("direct sums need complexes over the same degrees")
    mods = tuple(GammaModule(a.group, x.m + y.m, block_diag([x.basis, y.basis])) for x, y in zip(a.modules, b.modules))
    ds = tuple(block_diag([x, y]) for x, y in zip(a.differentials, b.differentials))
    return GammaComplex(mods, ds, a.start)


def random_chain_map(c: GammaComplex, rng: random.Random):
    """Target C (+) D and the chain map inclusion + (d h + h d) for a random equivariant h."""
    group = c.group
    exact = c.modules[0].basis.exact
    other = random_complex(group, rng, exact=exact)
    target = direct_sum(c, other)
    deg = list(c.degrees)
    homotopy = {}
    for n in deg[1:]:
        homotopy[n] = random_group_ring_matrix(group, target.module(n - 1).m, c.module(n).m, rng, 0.3, exact)
    maps = {}
    for n in deg:
        src, dst = c.module(n), target.module(n)
        incl = vstack([Matrix.identity(src.m * group.order, exact),
                       Matrix.zeros((dst.m - src.m) * group.order, src.m * group.order, exact)])
        total = incl
        if n in homotopy and target.differential(n - 1) is not None:
            total = total + target.differential(n - 1) @ homotopy[n]
        if n + 1 in homotopy and c.differential(n) is not None:
            total = total + homotopy[n + 1] @ c.differential(n)
        maps[n] = total
    return target, maps


def conjugate_complex(c: GammaComplex, rng: random.Random) -> GammaComplex:
    """Transport the complex along random equivariant isomorphisms of each term."""
    group = c.group
    exact = c.modules[0].basis.exact
    isos = [random_equivariant_iso(group, mod.m, rng, exact) for mod in c.modules]
    mods = tuple(GammaModule(group, mod.m, s @ mod.basis) for s, mod in zip(isos, c.modules))
    ds = tuple(isos[i + 1] @ d @ isos[i].inverse() for i, d in enumerate(c.differentials))
    return GammaComplex(mods, ds, c.start)


# ---------------------------------------------------------------- torsion in abelian families

@dataclass(frozen=True)
class TorsionReport:
    torsion_present: bool
    locus: tuple  # character angles where dims jump
    jump_dims: tuple
    von_neumann: tuple


def torsion_report(family) -> TorsionReport:
    """Dimension jumps on the sampled character set; they carry no von Neumann dimension."""
    return TorsionReport(
        torsion_present=bool(family.jumps),
        locus=tuple(s.angles for s in family.jumps),
        jump_dims=tuple(s.dims for s in family.jumps),
        von_neumann=family.von_neumann,
    )
