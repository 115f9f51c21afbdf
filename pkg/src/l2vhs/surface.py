"""Punctured surfaces, their fundamental-group presentation, and branched-cover numerology.

Generators are ordered a1, b1, ..., ag, bg, c1, ..., cs subject to the single
relation  [a1,b1] ... [ag,bg] c1 ... cs = 1  with [x,y] = x y x^-1 y^-1.
c_p is the meridian loop around puncture p.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import CoveringError, InvariantFailure, RelationError
from .groups import AbelianRank, FiniteGroup, element_order, is_generating, is_generating_abelian


@dataclass(frozen=True)
class SurfaceData:
    genus: int
    punctures: tuple = ()

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        object.__setattr__(self, "punctures", tuple(str(p) for p in self.punctures))

    @classmethod
    def make(cls, genus: int, punctures: Union[int, Sequence[str]]) -> "SurfaceData":
        if isinstance(punctures, int):
            punctures = [f"p{i + 1}" for i in range(punctures)]
        return cls(genus, tuple(punctures))

    @property
    def s(self) -> int:
        return len(self.punctures)

    @property
    def euler_open(self) -> int:
        """chi(M) = 2 - 2g - s."""
        return 2 - 2 * self.genus - self.s

    @property
    def euler_closed(self) -> int:
        """chi(X) = 2 - 2g."""
        return 2 - 2 * self.genus

    @property
    def generator_names(self) -> list:
        names = []
        for i in range(1, self.genus + 1):
            names += [f"a{i}", f"b{i}"]
        names += [f"c{p}" for p in range(1, self.s + 1)]
        return names

    @property
    def n_generators(self) -> int:
        return 2 * self.genus + self.s

    def relation_word(self) -> list:
        """The relator as a list of (generator index, +1/-1)."""
        word = []
        for i in range(self.genus):
            a, b = 2 * i, 2 * i + 1
            word += [(a, 1), (b, 1), (a, -1), (b, -1)]
        word += [(2 * self.genus + p, 1) for p in range(self.s)]
        return word


def relation_prefixes(surface: SurfaceData, images, mul, inv, identity):
    """Partial products of the relator after each generator block.

    Yields (generator name, partial product) after each commutator [a_i,b_i]
    (reported under b_i) and after each c_p.
    """
    out = identity
    names = surface.generator_names
    for i in range(surface.genus):
        a, b = images[2 * i], images[2 * i + 1]
        out = mul(mul(mul(mul(out, a), b), inv(a)), inv(b))
        yield names[2 * i + 1], out
    for p in range(surface.s):
        out = mul(out, images[2 * surface.genus + p])
        yield names[2 * surface.genus + p], out


def check_relation(surface: SurfaceData, images, mul, inv, identity, equal) -> None:
    """Raise RelationError naming the last generator if the relator is not the identity."""
    if len(images) != surface.n_generators:
        raise RelationError(f"expected {surface.n_generators} generator images, got {len(images)}")
    last = None
    total = identity
    for name, total in relation_prefixes(surface, images, mul, inv, identity):
        last = name
    if last is None:
        return
    if not equal(total, identity):
        raise RelationError(f"relation violated at generator {last}")


@dataclass(frozen=True)
class CoveringDatum:
    surface: SurfaceData
    group: Union[FiniteGroup, AbelianRank]
    images: tuple

    def __post_init__(self):
        if isinstance(self.group, AbelianRank):
            imgs = tuple(self.group.coerce(x) for x in self.images)
        else:
            imgs = tuple(int(x) for x in self.images)
            for x in imgs:
                if not 0 <= x < self.group.order:
                    raise CoveringError(f"group element index {x} out of range")
        object.__setattr__(self, "images", imgs)
        if len(imgs) != self.surface.n_generators:
            raise CoveringError(f"expected {self.surface.n_generators} images, got {len(imgs)}")

    @property
    def finite(self) -> bool:
        return isinstance(self.group, FiniteGroup)

    def meridian_images(self):
        return self.images[2 * self.surface.genus:]


@dataclass(frozen=True)
class CoverInvariants:
    n_p: tuple
    s_tilde: Union[int, None]
    euler_tilde: Union[int, None]
    genus_tilde: Union[int, None]


def trivial_covering(surface: SurfaceData) -> CoveringDatum:
    from .groups import trivial_group

    return CoveringDatum(surface, trivial_group(), (0,) * surface.n_generators)


def validate_covering(c: CoveringDatum) -> CoverInvariants:
    """Check relation and connectivity; return ramification data of the cover."""
    g = c.group
    check_relation(c.surface, list(c.images), g.mul, g.inv, g.identity, lambda x, y: x == y)
    if isinstance(g, AbelianRank):
        for name, x in zip(c.surface.generator_names[2 * c.surface.genus:], c.meridian_images()):
            if x != g.identity:
                raise CoveringError(f"meridian {name} must map to 0 in a torsion-free group")
        if not is_generating_abelian(g.d, c.images):
            raise CoveringError("images do not generate the group (cover is disconnected)")
        return CoverInvariants(tuple(1 for _ in c.meridian_images()), None, None, None)
    if not is_generating(g, c.images):
        raise CoveringError("images do not generate the group (cover is disconnected)")
    order = g.order
    n_p = tuple(element_order(g, x) for x in c.meridian_images())
    s_tilde = sum(order // n for n in n_p)
    euler_tilde = order * c.surface.euler_open + s_tilde
    genus2 = 2 - euler_tilde
    if genus2 % 2 or genus2 < 0:
        raise InvariantFailure(f"non-integral genus upstairs (chi = {euler_tilde})")
    return CoverInvariants(n_p, s_tilde, euler_tilde, genus2 // 2)


def riemann_hurwitz_classical(surface: SurfaceData, order: int, n_p: Sequence[int]) -> Fraction:
    """|G| chi(X) - sum_p (|G| - |G|/n_p)."""
    return Fraction(order * surface.euler_closed) - sum(Fraction(order) - Fraction(order, n) for n in n_p)
