"""Cohomology of the middle extension j_*V on the compact surface and of its finite covers.

Dimensions come from closed forms:

* h0 = simultaneous invariants of all generator matrices,
* h2 = coinvariants V / sum Im(A - I) (the invariants of the dual system),
* chi = (2 - 2g - s) n + sum_p dim ker(T_p - I),
* h1 = h0 + h2 - chi,

with an independent parabolic-cocycle computation of h1 (Fox calculus) as
cross-check.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .config import DEFAULT, Config
from .errors import CoveringError, InputError, InvariantFailure, NotQuasiUnitaryError
from .groups import AbelianRank, FiniteGroup, element_order, regular_rep
from .numeric import Matrix, eig_unit_circle, hstack, is_invertible, nullity, rank, vstack
from .surface import CoveringDatum, SurfaceData, check_relation, validate_covering

BASE, EXT_OF_PULLBACK, PULLBACK_OF_EXT = "base", "extensionOfPullback", "pullbackOfExtension"
PLAIN, VON_NEUMANN = "plain", "vonNeumann"


@dataclass(frozen=True, eq=False)
class LocalSystem:
    """Monodromy matrices for a1, b1, ..., ag, bg, c1, ..., cs."""

    surface: SurfaceData
    matrices: tuple
    n: int = field(init=False)

    def __post_init__(self):
        mats = tuple(self.matrices)
        object.__setattr__(self, "matrices", mats)
        if len(mats) != self.surface.n_generators:
            raise InputError(f"expected {self.surface.n_generators} matrices, got {len(mats)}")
        n = mats[0].rows if mats else 0
        object.__setattr__(self, "n", n)

    @classmethod
    def build(cls, surface: SurfaceData, matrices, rank_if_empty: int = 1, check: bool = True,
              quasi_unitary: bool = True, config: Config = DEFAULT) -> "LocalSystem":
        mats = tuple(matrices)
        if not mats:
            obj = cls.__new__(cls)
            object.__setattr__(obj, "surface", surface)
            object.__setattr__(obj, "matrices", ())
            object.__setattr__(obj, "n", rank_if_empty)
            object.__setattr__(obj, "_exact", config.exact)
            object.__setattr__(obj, "_tol", config.tol)
            return obj
        obj = cls(surface, mats)
        if check:
            obj.validate(quasi_unitary=quasi_unitary, config=config)
        return obj

    @property
    def exact(self) -> bool:
        return self.matrices[0].exact if self.matrices else getattr(self, "_exact", True)

    @property
    def tol(self) -> float:
        return self.matrices[0].tol if self.matrices else getattr(self, "_tol", DEFAULT.tol)

    def identity(self) -> Matrix:
        return Matrix.identity(self.n, self.exact, self.tol)

    @property
    def meridians(self) -> tuple:
        return self.matrices[2 * self.surface.genus:]

    def validate(self, quasi_unitary: bool = True, config: Config = DEFAULT) -> None:
        names = self.surface.generator_names
        for name, m in zip(names, self.matrices):
            if m.shape != (self.n, self.n):
                raise InputError(f"matrix for {name} has shape {m.shape}, expected {(self.n, self.n)}")
            if m.exact != self.exact:
                raise InputError("all matrices must use the same backend")
            if not is_invertible(m):
                raise InputError(f"matrix for {name} is not invertible")
        ident = self.identity()

        def close(x, y):
            if x.exact:
                return x.equals(y)
            scale = max(1.0, max(m.max_abs() for m in self.matrices)) ** 4
            return float(abs(x.to_numpy() - y.to_numpy()).max()) <= self.tol * scale

        check_relation(self.surface, list(self.matrices), lambda x, y: x @ y, lambda x: x.inverse(), ident, close)
        if quasi_unitary:
            for name, t in zip(names[2 * self.surface.genus:], self.meridians):
                try:
                    eig_unit_circle(t, cap=config.order_cap, cluster_tol=config.cluster_tol)
                except NotQuasiUnitaryError as exc:
                    raise NotQuasiUnitaryError(f"monodromy at {name} is not quasi-unitary: {exc}") from exc

    def twisted(self, scalars: Sequence[complex]) -> "LocalSystem":
        """System with each generator matrix multiplied by a scalar (float backend)."""
        mats = tuple(m.to_float().scale(z) for m, z in zip(self.matrices, scalars))
        return LocalSystem(self.surface, mats)

    def to_float(self) -> "LocalSystem":
        if not self.matrices:
            return LocalSystem.build(self.surface, (), self.n, config=DEFAULT.with_(backend="float", tol=self.tol))
        return LocalSystem(self.surface, tuple(m.to_float() for m in self.matrices))


def trivial_system(surface: SurfaceData, n: int = 1, exact: bool = True, tol: float = DEFAULT.tol) -> LocalSystem:
    ident = Matrix.identity(n, exact, tol)
    cfg = DEFAULT.with_(backend="exact" if exact else "float", tol=tol)
    return LocalSystem.build(surface, [ident] * surface.n_generators, rank_if_empty=n, check=False, config=cfg)


@dataclass(frozen=True)
class CohomologyReport:
    h0: Fraction
    h1: Fraction
    h2: Fraction
    chi: Fraction
    normalization: str = PLAIN
    model: str = BASE

    def __post_init__(self):
        for name in ("h0", "h1", "h2", "chi"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.chi != self.h0 - self.h1 + self.h2:
            raise InvariantFailure(f"chi {self.chi} != h0 - h1 + h2 for {self.dims}")
        if min(self.h0, self.h1, self.h2) < 0:
            raise InvariantFailure(f"negative cohomology dimension {self.dims}")

    @property
    def dims(self) -> tuple:
        return (self.h0, self.h1, self.h2)

    def scaled(self, factor: Fraction, normalization: str, model: str) -> "CohomologyReport":
        return CohomologyReport(self.h0 * factor, self.h1 * factor, self.h2 * factor, self.chi * factor,
                                normalization, model)


def stalk_dim(t: Matrix) -> int:
    """dim ker(T_p - I), the stalk of j_*V at the puncture."""
    return nullity(t - t.like_identity())


def _h0_h2(mats: Sequence[Matrix], n: int, exact: bool, tol: float):
    if not mats:
        return n, n
    ident = mats[0].like_identity()
    diffs = [m - ident for m in mats]
    h0 = n - rank(vstack(diffs))
    h2 = n - rank(hstack(diffs))
    return h0, h2


def global_h(system: LocalSystem) -> CohomologyReport:
    n = system.n
    h0, h2 = _h0_h2(system.matrices, n, system.exact, system.tol)
    stalks = sum(stalk_dim(t) for t in system.meridians)
    chi = system.surface.euler_open * n + stalks
    return CohomologyReport(h0, h0 + h2 - chi, h2, chi, PLAIN, BASE)


def fox_blocks(system: LocalSystem) -> list:
    """n x n blocks C_g with the linearised relation  sum_g C_g x_g = 0  for cocycles x."""
    mats = system.matrices
    n = system.n
    ident = system.identity()
    inverses = [m.inverse() for m in mats]
    blocks = [Matrix.zeros(n, n, system.exact, system.tol) for _ in mats]
    prefix = ident
    for g, sign in system.surface.relation_word():
        if sign > 0:
            blocks[g] = blocks[g] + prefix
            prefix = prefix @ mats[g]
        else:
            prefix = prefix @ inverses[g]
            blocks[g] = blocks[g] - prefix
    return blocks


def parabolic_h1(system: LocalSystem) -> int:
    """dim of parabolic cocycles (x_{c_p} in Im(T_p - I)) modulo coboundaries."""
    n = system.n
    gcount = len(system.matrices)
    if gcount == 0:
        return 0
    ident = system.identity()
    genus = system.surface.genus
    blocks = fox_blocks(system)
    cols = []
    for g, c in enumerate(blocks):
        if g >= 2 * genus:
            c = c @ (system.matrices[g] - ident)
        cols.append(c)
    fox = hstack(cols)
    stalks = sum(stalk_dim(t) for t in system.meridians)
    z_par = gcount * n - rank(fox) - stalks
    h0 = n - rank(vstack([m - ident for m in system.matrices]))
    return z_par - (n - h0)


def induced_cover_system(system: LocalSystem, cover: CoveringDatum) -> LocalSystem:
    """pi_* pi^* V on the base: monodromy A_gamma (x) L(phi(gamma))."""
    if not cover.finite:
        raise CoveringError("induced systems need a finite group; use character_family for Z^d")
    if cover.surface != system.surface:
        raise CoveringError("cover and local system live on different surfaces")
    group = cover.group
    reps = [regular_rep(group, x, system.exact, system.tol) for x in cover.images]
    if not system.matrices:
        return LocalSystem.build(system.surface, (), system.n * group.order, check=False,
                                 config=DEFAULT.with_(backend="exact" if system.exact else "float", tol=system.tol))
    return LocalSystem(system.surface, tuple(a.kron(r) for a, r in zip(system.matrices, reps)))


@dataclass(frozen=True)
class ModelComparison:
    extension_of_pullback: CohomologyReport
    pullback_of_extension: CohomologyReport
    quotient_dims: tuple  # dim Q_p, plain (not divided by |Gamma|)
    diverge: bool


def _small_model(system: LocalSystem, cover: CoveringDatum, big_sys: LocalSystem, big: CohomologyReport):
    group = cover.group
    order = group.order
    n = system.n
    exact, tol = system.exact, system.tol
    id_n = system.identity()
    id_g = Matrix.identity(order, exact, tol)
    id_big = Matrix.identity(n * order, exact, tol)
    quotients = []
    constraints = [m - id_big for m in big_sys.matrices]
    for t, h in zip(system.meridians, cover.meridian_images()):
        n_p = element_order(group, h)
        big_stalk = stalk_dim(t.kron(regular_rep(group, h, exact, tol)))
        quotients.append(big_stalk - stalk_dim(t) * (order // n_p))
        constraints.append((t - id_n).kron(id_g))
        constraints.append(id_n.kron(regular_rep(group, h, exact, tol) - id_g))
    h0_small = n * order - rank(vstack(constraints)) if constraints else n * order
    h0_big = big.h0
    coker = sum(quotients) - (h0_big - h0_small)
    h1_small = big.h1 + coker
    h2_small = big.h2
    chi_small = h0_small - h1_small + h2_small
    if chi_small != big.chi - sum(quotients):
        raise InvariantFailure("six-term sequence does not balance")
    return CohomologyReport(h0_small, h1_small, h2_small, chi_small), tuple(quotients)


def compare_models(system: LocalSystem, cover: CoveringDatum) -> ModelComparison:
    validate_covering(cover)
    if not cover.finite:
        raise CoveringError("stalk models need a finite group")
    order = cover.group.order
    big_sys = induced_cover_system(system, cover)
    big = global_h(big_sys)
    small, quotients = _small_model(system, cover, big_sys, big)
    f = Fraction(1, order)
    ext = big.scaled(f, VON_NEUMANN, EXT_OF_PULLBACK)
    pb = small.scaled(f, VON_NEUMANN, PULLBACK_OF_EXT)
    return ModelComparison(ext, pb, quotients, ext.dims != pb.dims)


def l2_cohomology_finite(system: LocalSystem, cover: CoveringDatum, model: str = PULLBACK_OF_EXT) -> CohomologyReport:
    cmp_ = compare_models(system, cover)
    if model == EXT_OF_PULLBACK:
        return cmp_.extension_of_pullback
    if model == PULLBACK_OF_EXT:
        return cmp_.pullback_of_extension
    raise InputError(f"unknown stalk model {model!r}")


@dataclass(frozen=True)
class RiemannHurwitz:
    lhs: Fraction
    rhs: Fraction
    equal: bool
    chi_cover: Fraction
    chi_base: Fraction
    n_p: tuple


def riemann_hurwitz_check(system: LocalSystem, cover: CoveringDatum) -> RiemannHurwitz:
    """chi_{2,Gamma}(cover) - sum_p stalk_p / n_p  versus  chi_2(base) - sum_p stalk_p."""
    inv = validate_covering(cover)
    small = l2_cohomology_finite(system, cover, PULLBACK_OF_EXT)
    base = global_h(system)
    stalks = [stalk_dim(t) for t in system.meridians]
    lhs = small.chi - sum(Fraction(d, n) for d, n in zip(stalks, inv.n_p))
    rhs = base.chi - sum(stalks)
    return RiemannHurwitz(lhs, rhs, lhs == rhs, small.chi, base.chi, inv.n_p)


# ---------------------------------------------------------------- abelian families

@dataclass(frozen=True)
class CharacterSample:
    angles: tuple  # character t_j = exp(2 pi i angle_j)
    dims: tuple


@dataclass(frozen=True)
class CharacterFamily:
    d: int
    generic: tuple
    von_neumann: tuple
    samples: tuple  # of CharacterSample, trivial character first
    jumps: tuple  # of CharacterSample exceeding the generic dims


def _character_value(phi, angles) -> complex:
    return cmath.exp(2j * math.pi * sum(k * a for k, a in zip(phi, angles)))


def twisted_dims(system: LocalSystem, cover: CoveringDatum, angles) -> tuple:
    fl = system.to_float()
    if not fl.matrices:
        rep = global_h(fl)
    else:
        rep = global_h(fl.twisted([_character_value(phi, angles) for phi in cover.images]))
    return (int(rep.h0), int(rep.h1), int(rep.h2))


def character_family(system: LocalSystem, cover: CoveringDatum, samples: int = DEFAULT.samples, seed: int = 0,
                     extra_points: Sequence = ()) -> CharacterFamily:
    """Twisted cohomology at the trivial character, at extra points, and at seeded random characters."""
    if not isinstance(cover.group, AbelianRank):
        raise CoveringError("character families need a Z^d cover")
    validate_covering(cover)
    d = cover.group.d
    rng = random.Random(seed)
    trivial = (0.0,) * d
    points = [trivial] + [tuple(float(a) for a in p) for p in extra_points]
    randoms = [tuple(rng.random() for _ in range(d)) for _ in range(samples)]
    sampled = [CharacterSample(p, twisted_dims(system, cover, p)) for p in points]
    random_samples = [CharacterSample(p, twisted_dims(system, cover, p)) for p in randoms]
    pool = random_samples or sampled
    generic = tuple(min(s.dims[i] for s in pool) for i in range(3))
    everything = sampled + random_samples
    jumps = tuple(s for s in everything if any(x > g for x, g in zip(s.dims, generic)))
    return CharacterFamily(d, generic, generic, tuple(everything), jumps)


# ---------------------------------------------------------------- skyscrapers

@dataclass(frozen=True)
class SkyscraperDatum:
    dims: dict  # point label -> dimension

    def __post_init__(self):
        for p, v in self.dims.items():
            if int(v) < 0:
                raise InputError(f"negative skyscraper dimension at {p}")


def skyscraper_summand(datum: SkyscraperDatum, cover: CoveringDatum = None) -> CohomologyReport:
    """Punctual summands contribute only in degree 0, with Gamma-dimension 1 per unit of stalk."""
    h0 = sum(int(v) for v in datum.dims.values())
    return CohomologyReport(h0, 0, 0, h0, VON_NEUMANN, BASE)
