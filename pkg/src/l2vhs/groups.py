"""Finite groups by multiplication table, plus the free abelian rank marker."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import GroupError
from .numeric import Matrix


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group on {0..order-1}; ``table[x][y]`` is the index of x*y."""

    table: tuple
    name: str = ""
    _inv: tuple = field(init=False, repr=False)
    _identity: int = field(init=False, repr=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0:
            raise GroupError("empty group table")
        full = set(range(n))
        for row in table:
            if len(row) != n or set(row) != full:
                raise GroupError("table rows must be permutations of the elements")
        for j in range(n):
            if {table[i][j] for i in range(n)} != full:
                raise GroupError("table columns must be permutations of the elements")
        ident = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
        if len(ident) != 1:
            raise GroupError("table has no two-sided identity")
        e = ident[0]
        if n <= 64:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = random.Random(n)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(20000))
        for x, y, z in triples:
            if table[table[x][y]][z] != table[x][table[y][z]]:
                raise GroupError(f"table is not associative at ({x},{y},{z})")
        inv = tuple(next(y for y in range(n) if table[x][y] == e) for x in range(n))
        object.__setattr__(self, "_inv", inv)
        object.__setattr__(self, "_identity", e)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return self._identity

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self._inv[x]

    def product(self, elems: Sequence[int]) -> int:
        out = self._identity
        for x in elems:
            out = self.table[out][x]
        return out

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv(x), -k
        out = self._identity
        for _ in range(k):
            out = self.table[out][x]
        return out

    def commutator(self, x: int, y: int) -> int:
        """x y x^-1 y^-1."""
        return self.product([x, y, self.inv(x), self.inv(y)])

    def elements(self):
        return range(self.order)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    @classmethod
    def from_permutations(cls, generators: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        """Group generated by permutations in one-line notation (0-based images).

        Element 0 is the identity; the generators get the next indices in order
        of first discovery.
        """
        gens = [tuple(int(v) for v in g) for g in generators]
        if not gens:
            return trivial_group()
        deg = len(gens[0])
        for g in gens:
            if len(g) != deg or sorted(g) != list(range(deg)):
                raise GroupError(f"not a permutation: {g}")
        ident = tuple(range(deg))
        elems = [ident]
        index = {ident: 0}
        for g in gens:
            if g not in index:
                index[g] = len(elems)
                elems.append(g)
        i = 0
        while i < len(elems):
            x = elems[i]
            for g in gens:
                y = tuple(x[g[k]] for k in range(deg))  # x after g
                if y not in index:
                    index[y] = len(elems)
                    elems.append(y)
            i += 1
        table = [[index[tuple(x[y[k]] for k in range(deg))] for y in elems] for x in elems]
        group = cls(tuple(map(tuple, table)), name)
        object.__setattr__(group, "perms", tuple(elems))
        return group


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),), "1")


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)), f"Z/{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return FiniteGroup.from_permutations([rot, ref], f"D{n}")


def symmetric_group(n: int) -> FiniteGroup:
    if n == 1:
        return trivial_group()
    cyc = [(i + 1) % n for i in range(n)]
    swap = [1, 0] + list(range(2, n))
    return FiniteGroup.from_permutations([swap, cyc], f"S{n}")


def element_order(group: FiniteGroup, g: int) -> int:
    """Least k >= 1 with g^k = e."""
    k, x = 1, g
    while x != group.identity:
        x = group.mul(x, g)
        k += 1
    return k


def cyclic_subgroup(group: FiniteGroup, h: int) -> list:
    out = [group.identity]
    x = h
    while x != group.identity:
        out.append(x)
        x = group.mul(x, h)
    return out


def cosets(group: FiniteGroup, h: int) -> list:
    """Left cosets xH of the cyclic subgroup H = <h>, each as a sorted list."""
    sub = cyclic_subgroup(group, h)
    seen = set()
    out = []
    for x in group.elements():
        if x in seen:
            continue
        c = sorted({group.mul(x, y) for y in sub})
        seen.update(c)
        out.append(c)
    return out


def regular_rep(group: FiniteGroup, g: int, exact: bool = True, tol: float = 1e-9) -> Matrix:
    """Left translation L_g e_x = e_{gx} as a permutation matrix."""
    n = group.order
    rows = [[0] * n for _ in range(n)]
    for x in range(n):
        rows[group.mul(g, x)][x] = 1
    return Matrix.from_rows(rows, exact=exact, tol=tol)


def right_rep(group: FiniteGroup, g: int, exact: bool = True, tol: float = 1e-9) -> Matrix:
    """Right multiplication R_g e_x = e_{x g^-1}; commutes with every left translation."""
    n = group.order
    gi = group.inv(g)
    rows = [[0] * n for _ in range(n)]
    for x in range(n):
        rows[group.mul(x, gi)][x] = 1
    return Matrix.from_rows(rows, exact=exact, tol=tol)


def closure(group: FiniteGroup, elements: Sequence[int]) -> set:
    out = {group.identity}
    frontier = [group.identity]
    gens = list(elements)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = group.mul(x, g)
            if y not in out:
                out.add(y)
                frontier.append(y)
    return out


def is_generating(group: FiniteGroup, elements: Sequence[int]) -> bool:
    return len(closure(group, elements)) == group.order


@dataclass(frozen=True)
class AbelianRank:
    """The free abelian group Z^d; elements are integer d-tuples."""

    d: int

    def __post_init__(self):
        if self.d < 0:
            raise GroupError("rank must be non-negative")

    @property
    def identity(self):
        return (0,) * self.d

    def coerce(self, x):
        if isinstance(x, int):
            x = (x,)
        x = tuple(int(v) for v in x)
        if len(x) != self.d:
            raise GroupError(f"expected an element of Z^{self.d}, got {x}")
        return x

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv(self, x):
        return tuple(-a for a in x)

    def product(self, elems):
        out = self.identity
        for x in elems:
            out = self.mul(out, x)
        return out

    def commutator(self, x, y):
        return self.identity


def is_generating_abelian(d: int, elements) -> bool:
    """Whether integer vectors generate Z^d: rank d and unit gcd of maximal minors."""
    from math import gcd
    from flint import fmpz_mat

    vecs = [list(v) for v in elements if any(v)]
    if d == 0:
        return True
    if len(vecs) < d:
        return False
    m = fmpz_mat(vecs)
    if m.rank() < d:
        return False
    g = 0
    for rows in itertools.combinations(range(len(vecs)), d):
        sub = fmpz_mat([vecs[r] for r in rows])
        g = gcd(g, int(sub.det()))
        if g == 1:
            return True
    return g == 1
