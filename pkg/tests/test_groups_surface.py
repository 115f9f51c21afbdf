import itertools
import random

import pytest

from l2vhs.errors import CoveringError, GroupError, RelationError
from l2vhs.groups import (
    AbelianRank,
    FiniteGroup,
    cosets,
    cyclic_group,
    dihedral_group,
    element_order,
    is_generating,
    regular_rep,
    symmetric_group,
    trivial_group,
)
from l2vhs.numeric import Matrix
from l2vhs.surface import CoveringDatum, SurfaceData, riemann_hurwitz_classical, trivial_covering, validate_covering

S3 = FiniteGroup.from_permutations([[1, 0, 2], [1, 2, 0]])
TRANSPOSITION = S3.perms.index((1, 0, 2))
THREE_CYCLE = S3.perms.index((1, 2, 0))
SMALL_GROUPS = [trivial_group(), cyclic_group(2), cyclic_group(5), cyclic_group(12), dihedral_group(4),
                dihedral_group(6), symmetric_group(3), symmetric_group(4)]


def test_element_order_examples():
    for g in SMALL_GROUPS:
        assert element_order(g, g.identity) == 1
    assert element_order(S3, TRANSPOSITION) == 2
    assert element_order(S3, THREE_CYCLE) == 3


def test_coset_examples():
    assert len(cosets(cyclic_group(4), 2)) == 2
    g = dihedral_group(5)
    assert len(cosets(g, g.identity)) == g.order
    assert len(cosets(S3, TRANSPOSITION)) == 3


def test_regular_rep_examples():
    z2 = cyclic_group(2)
    assert regular_rep(z2, 0).equals(Matrix.identity(2))
    assert regular_rep(z2, 1).equals(Matrix.from_rows([[0, 1], [1, 0]]))
    for g in SMALL_GROUPS:
        for x in g.elements():
            assert regular_rep(g, x).trace() == (g.order if x == g.identity else 0)


def test_is_generating_examples():
    assert is_generating(S3, [TRANSPOSITION, THREE_CYCLE])
    assert not is_generating(cyclic_group(4), [2])
    for g in SMALL_GROUPS:
        assert is_generating(g, list(g.elements()))


@pytest.mark.parametrize("group", SMALL_GROUPS, ids=lambda g: g.name)
def test_group_properties(group):
    reps = {x: regular_rep(group, x) for x in group.elements()}
    for x, y in itertools.product(group.elements(), repeat=2):
        assert reps[group.mul(x, y)].equals(reps[x] @ reps[y])
    assert len({tuple(map(tuple, reps[x].entries())) for x in group.elements()}) == group.order  # faithful
    for x in group.elements():
        assert group.order % element_order(group, x) == 0
        assert sum(len(c) for c in cosets(group, x)) == group.order


def test_bad_tables_rejected():
    with pytest.raises(GroupError):
        FiniteGroup(((0, 1), (0, 1)))
    with pytest.raises(GroupError):
        # Latin square with identity 0 that is not associative
        FiniteGroup(((0, 1, 2, 3, 4), (1, 0, 3, 4, 2), (2, 4, 0, 1, 3), (3, 2, 4, 0, 1), (4, 3, 1, 2, 0)))


# ---------------------------------------------------------------- surfaces and covers

def test_surface_euler():
    s = SurfaceData.make(2, 3)
    assert (s.euler_open, s.euler_closed) == (-5, -2)
    assert s.generator_names == ["a1", "b1", "a2", "b2", "c1", "c2", "c3"]


def test_z2_sphere_cover():
    inv = validate_covering(CoveringDatum(SurfaceData.make(0, 3), cyclic_group(2), (1, 1, 0)))
    assert inv.n_p == (2, 2, 1)
    assert (inv.s_tilde, inv.euler_tilde, inv.genus_tilde) == (4, 2, 0)


def test_trivial_cover_and_abelian_cover():
    surface = SurfaceData.make(2, 2)
    inv = validate_covering(trivial_covering(surface))
    assert inv.n_p == (1, 1)
    assert inv.euler_tilde - inv.s_tilde == surface.euler_open
    inv = validate_covering(CoveringDatum(SurfaceData.make(1, 0), AbelianRank(1), ((1,), (0,))))
    assert inv.n_p == ()


def test_cover_errors():
    surface = SurfaceData.make(0, 3)
    with pytest.raises(RelationError):
        validate_covering(CoveringDatum(surface, cyclic_group(2), (1, 0, 0)))
    with pytest.raises(CoveringError):
        validate_covering(CoveringDatum(surface, cyclic_group(4), (2, 2, 0)))  # generates only <2>
    with pytest.raises(CoveringError):
        validate_covering(CoveringDatum(SurfaceData.make(1, 2), AbelianRank(1), ((1,), (0,), (1,), (-1,))))


def test_classical_riemann_hurwitz_on_random_covers():
    from l2vhs.random_instances import random_cover

    rng = random.Random(2)
    for _ in range(60):
        surface = SurfaceData.make(rng.randint(0, 2), rng.randint(0, 4))
        cover = random_cover(rng, surface)
        inv = validate_covering(cover)
        order = cover.group.order
        assert inv.euler_tilde == riemann_hurwitz_classical(surface, order, inv.n_p)
        assert inv.genus_tilde >= 0


def test_puncture_permutation_permutes_n_p():
    surface = SurfaceData.make(0, 4)
    z6 = cyclic_group(6)
    images = (2, 3, 1, 0)
    inv = validate_covering(CoveringDatum(surface, z6, images))
    for perm in itertools.permutations(range(4)):
        permuted = validate_covering(CoveringDatum(surface, z6, tuple(images[i] for i in perm)))
        assert permuted.n_p == tuple(inv.n_p[i] for i in perm)
        assert permuted.euler_tilde == inv.euler_tilde
