"""Seeded random local systems and finite covers for the randomized suites.

Monodromies are drawn from groups whose elements are automatically
quasi-unitary: upper triangular matrices with fourth-root-of-unity
diagonals, monomial matrices with fourth-root-of-unity entries, and block
sums of both, all conjugated by a random unimodular integer matrix.  The
last meridian is solved from the surface relation, so every instance
satisfies it exactly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .cohomology import LocalSystem
from .config import DEFAULT, Config
from .errors import CoveringError, RelationError
from .groups import FiniteGroup, cyclic_group, dihedral_group, symmetric_group, trivial_group
from .numeric import Matrix, block_diag
from .surface import CoveringDatum, SurfaceData, validate_covering

UNITS = (1, -1, 1j, -1j)


def _gauss_int(rng: random.Random, bound: int = 2) -> complex:
    return complex(rng.randint(-bound, bound), rng.randint(-bound, bound) if rng.random() < 0.5 else 0)


def random_triangular(n: int, rng: random.Random, unipotent: bool = False, exact: bool = True) -> Matrix:
    rows = [[0j] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 1 if unipotent else rng.choice(UNITS)
        for j in range(i + 1, n):
            rows[i][j] = _gauss_int(rng) if rng.random() < 0.6 else 0
    return Matrix.from_rows(rows, exact)


def random_monomial(n: int, rng: random.Random, exact: bool = True) -> Matrix:
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[0j] * n for _ in range(n)]
    for i, j in enumerate(perm):
        rows[i][j] = rng.choice(UNITS)
    return Matrix.from_rows(rows, exact)


def random_unimodular(n: int, rng: random.Random, steps: int = None, exact: bool = True) -> Matrix:
    """Product of elementary integer row operations (determinant 1)."""
    m = Matrix.identity(n, exact)
    if n == 1:
        return m
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2)
        rows = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        rows[i][j] = rng.choice([-1, 1])
        m = m @ Matrix.from_rows(rows, exact)
    return m


def _relation_solve_last(surface: SurfaceData, chosen: list, mul, inv, identity):
    """Image of c_s making prod [a_i, b_i] c_1 ... c_s = 1."""
    acc = identity
    for i in range(surface.genus):
        a, b = chosen[2 * i], chosen[2 * i + 1]
        acc = mul(mul(mul(mul(acc, a), b), inv(a)), inv(b))
    for c in chosen[2 * surface.genus:]:
        acc = mul(acc, c)
    return inv(acc)


@dataclass(frozen=True)
class InstanceShape:
    max_genus: int = 2
    max_punctures: int = 4
    max_rank: int = 4
    min_punctures: int = 0


def random_surface(rng: random.Random, shape: InstanceShape = InstanceShape()) -> SurfaceData:
    g = rng.randint(0, shape.max_genus)
    s = rng.randint(shape.min_punctures, shape.max_punctures)
    return SurfaceData.make(g, s)


def random_local_system(rng: random.Random, surface: SurfaceData = None, rank: int = None,
                        shape: InstanceShape = InstanceShape(), unipotent: bool = False,
                        config: Config = DEFAULT) -> LocalSystem:
    """Random quasi-unitary system; ``unipotent`` makes every meridian unipotent."""
    surface = surface or random_surface(rng, shape)
    n = rank or rng.randint(1, shape.max_rank)
    exact = config.exact
    kind = "triangular" if unipotent else rng.choice(["triangular", "monomial", "mixed"])
    split = rng.randint(1, n - 1) if kind == "mixed" and n > 1 else None
    if kind == "mixed" and split is None:
        kind = "triangular"

    def draw(meridian: bool) -> Matrix:
        uni = unipotent and meridian
        if kind == "triangular":
            return random_triangular(n, rng, uni, exact)
        if kind == "monomial":
            return random_monomial(n, rng, exact)
        return block_diag([random_triangular(split, rng, False, exact), random_monomial(n - split, rng, exact)])

    g, s = surface.genus, surface.s
    mats = []
    for _ in range(g):
        a = draw(False)
        mats.append(a)
        mats.append(draw(False) if s else a ** rng.randint(0, 3))  # s = 0 needs commuting pairs
    for _ in range(max(s - 1, 0)):
        mats.append(draw(True))
    if s:
        ident = Matrix.identity(n, exact)
        mats.append(_relation_solve_last(surface, mats, lambda x, y: x @ y, lambda x: x.inverse(), ident))
    conj = random_unimodular(n, rng, exact=exact)
    conj_inv = conj.inverse()
    mats = [conj @ m @ conj_inv for m in mats]
    if not exact:
        mats = [m.to_float() for m in mats]
    return LocalSystem.build(surface, mats, rank_if_empty=n, config=config)


@lru_cache(maxsize=None)
def _group_catalogue(max_order: int) -> tuple:
    options = [cyclic_group(k) for k in range(2, min(max_order, 12) + 1)]
    options += [dihedral_group(k) for k in range(3, max_order // 2 + 1) if k <= 12]
    options.append(symmetric_group(3))
    if max_order >= 24:
        options += [symmetric_group(4), cyclic_group(24)]
    return tuple(options)


def _random_group(rng: random.Random, max_order: int) -> FiniteGroup:
    return rng.choice(_group_catalogue(max_order))


def random_cover(rng: random.Random, surface: SurfaceData, max_order: int = 24, attempts: int = 40) -> CoveringDatum:
    """Connected finite cover; falls back to smaller groups when the surface forces it."""
    for _ in range(attempts):
        group = _random_group(rng, max_order)
        g, s = surface.genus, surface.s
        chosen = [rng.randrange(group.order) for _ in range(2 * g + max(s - 1, 0))]
        if s:
            chosen.append(_relation_solve_last(surface, chosen, group.mul, group.inv, group.identity))
        cover = CoveringDatum(surface, group, tuple(chosen))
        try:
            validate_covering(cover)
        except (CoveringError, RelationError):
            continue
        return cover
    # g = 0 with few punctures can only support small (or trivial) groups
    if surface.genus == 0 and surface.s >= 2:
        images = [1] + [0] * (surface.s - 2) + [1]
        cover = CoveringDatum(surface, cyclic_group(2), tuple(images))
        validate_covering(cover)
        return cover
    return CoveringDatum(surface, trivial_group(), (0,) * surface.n_generators)


@dataclass(frozen=True)
class RandomInstance:
    seed: int
    system: LocalSystem
    cover: CoveringDatum


def random_instance(seed: int, shape: InstanceShape = InstanceShape(), unipotent: bool = False,
                    max_order: int = 24, trivial_group_cover: bool = False,
                    config: Config = DEFAULT) -> RandomInstance:
    rng = random.Random(seed)
    surface = random_surface(rng, shape)
    system = random_local_system(rng, surface, shape=shape, unipotent=unipotent, config=config)
    if trivial_group_cover:
        cover = CoveringDatum(surface, trivial_group(), (0,) * surface.n_generators)
    else:
        cover = random_cover(rng, surface, max_order)
    return RandomInstance(seed, system, cover)


def random_nilpotent(n: int, rng: random.Random, exact: bool = True) -> Matrix:
    """Conjugate of a random Jordan-block nilpotent by a unimodular matrix."""
    blocks = []
    left = n
    while left:
        m = rng.randint(1, left)
        blocks.append(m)
        left -= m
    rows = [[0] * n for _ in range(n)]
    pos = 0
    for m in blocks:
        for i in range(m - 1):
            rows[pos + i][pos + i + 1] = 1
        pos += m
    nmat = Matrix.from_rows(rows, exact)
    conj = random_unimodular(n, rng, exact=exact)
    return conj @ nmat @ conj.inverse()
