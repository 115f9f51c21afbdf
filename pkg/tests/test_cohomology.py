import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from l2vhs.cohomology import (
    EXT_OF_PULLBACK,
    PULLBACK_OF_EXT,
    LocalSystem,
    SkyscraperDatum,
    character_family,
    compare_models,
    global_h,
    induced_cover_system,
    l2_cohomology_finite,
    parabolic_h1,
    riemann_hurwitz_check,
    skyscraper_summand,
    stalk_dim,
    trivial_system,
)
from l2vhs.errors import CoveringError, NotQuasiUnitaryError, RelationError
from l2vhs.gamma import torsion_report
from l2vhs.groups import AbelianRank, cyclic_group, regular_rep, trivial_group
from l2vhs.numeric import Matrix
from l2vhs.random_instances import random_instance
from l2vhs.surface import CoveringDatum, SurfaceData, trivial_covering

SPHERE3 = SurfaceData.make(0, 3)
Z2_COVER = CoveringDatum(SPHERE3, cyclic_group(2), (1, 1, 0))
SWAP = Matrix.from_rows([[0, 1], [1, 0]])


def rank1(surface, values, exact=True):
    return LocalSystem.build(surface, [Matrix.from_rows([[v]], exact) for v in values])


def worked_rank2():
    a = Matrix.from_rows([[1, 1], [0, 1]])
    b = Matrix.from_rows([[2, 0], [0, 1]])
    t = (a @ b @ a.inverse() @ b.inverse()).inverse()
    return LocalSystem.build(SurfaceData.make(1, 1), [a, b, t]), t


def h0_oracle(system) -> int:
    """Invariants by SVD of the stacked (A - I)."""
    n = system.n
    if not system.matrices:
        return n
    stacked = np.vstack([m.to_numpy() - np.eye(n) for m in system.matrices])
    sv = np.linalg.svd(stacked, compute_uv=False)
    return n - int(np.sum(sv > 1e-8))


def test_stalk_dim_examples():
    assert stalk_dim(Matrix.identity(3)) == 3
    assert stalk_dim(Matrix.from_rows([[1, 1], [0, 1]])) == 1
    assert stalk_dim(Matrix.diag([-1, -1])) == 0


@pytest.mark.parametrize("genus,punctures", [(0, 1), (1, 1), (2, 3), (2, 0)])
def test_trivial_rank1(genus, punctures):
    rep = global_h(trivial_system(SurfaceData.make(genus, punctures)))
    assert rep.dims == (1, 2 * genus, 1) and rep.chi == 2 - 2 * genus


def test_worked_rank2_example():
    system, t = worked_rank2()
    assert t.equals(Matrix.from_rows([[1, 1], [0, 1]]))
    rep = global_h(system)
    assert rep.dims == (0, 2, 1) and rep.chi == -1
    assert parabolic_h1(system) == 2


def test_sign_twisted_sphere():
    system = rank1(SPHERE3, [-1, -1, 1])
    rep = global_h(system)
    assert rep.dims == (0, 0, 0) and rep.chi == 0
    assert parabolic_h1(system) == 0
    assert parabolic_h1(trivial_system(SurfaceData.make(1, 1))) == 2


def test_input_validation():
    with pytest.raises(RelationError):
        rank1(SPHERE3, [-1, 1, 1])
    with pytest.raises(NotQuasiUnitaryError):
        rank1(SPHERE3, [2, Fraction(1, 2), 1])


def test_induced_cover_examples():
    system = trivial_system(SPHERE3)
    assert induced_cover_system(system, trivial_covering(SPHERE3)).matrices == system.matrices
    big = induced_cover_system(system, Z2_COVER)
    assert big.matrices[0].equals(SWAP) and big.matrices[1].equals(SWAP)
    assert big.matrices[2].equals(Matrix.identity(2))
    big = induced_cover_system(rank1(SPHERE3, [-1, -1, 1]), Z2_COVER)
    assert big.matrices[0].equals(SWAP.scale(-1)) and big.matrices[2].equals(Matrix.identity(2))
    with pytest.raises(CoveringError):
        induced_cover_system(trivial_system(SurfaceData.make(1, 0)),
                             CoveringDatum(SurfaceData.make(1, 0), AbelianRank(1), ((1,), (0,))))


def test_stalk_model_examples():
    system = trivial_system(SPHERE3)
    assert l2_cohomology_finite(system, trivial_covering(SPHERE3)).dims == global_h(system).dims
    cmp_ = compare_models(system, Z2_COVER)
    assert cmp_.extension_of_pullback.chi == cmp_.pullback_of_extension.chi == 1
    assert not cmp_.diverge
    cmp_ = compare_models(rank1(SPHERE3, [-1, -1, 1]), Z2_COVER)
    assert cmp_.extension_of_pullback.chi == 1
    assert cmp_.pullback_of_extension.chi == 0
    assert cmp_.diverge
    assert cmp_.extension_of_pullback.normalization == "vonNeumann"


def test_riemann_hurwitz_examples():
    rh = riemann_hurwitz_check(trivial_system(SPHERE3), Z2_COVER)
    assert (rh.lhs, rh.rhs, rh.equal) == (-1, -1, True)
    system, _ = worked_rank2()
    rh = riemann_hurwitz_check(system, trivial_covering(system.surface))
    base = global_h(system)
    assert rh.lhs == rh.rhs == base.chi - stalk_dim(system.meridians[0])


def test_random_instances_invariants():
    for seed in range(60):
        inst = random_instance(10_000 + seed)
        system, cover = inst.system, inst.cover
        base = global_h(system)
        assert base.h0 == h0_oracle(system)
        assert base.h1 == parabolic_h1(system)
        assert riemann_hurwitz_check(system, cover).equal
        cmp_ = compare_models(system, cover)
        big, small = cmp_.extension_of_pullback, cmp_.pullback_of_extension
        assert small.h0 <= big.h0 and small.h2 == big.h2
        # chi additivity of the induced system
        induced = induced_cover_system(system, cover)
        order = cover.group.order
        stalks = sum(stalk_dim(t.kron(regular_rep(cover.group, h)))
                     for t, h in zip(system.meridians, cover.meridian_images()))
        assert global_h(induced).chi == order * system.surface.euler_open * system.n + stalks
        assert big.chi == Fraction(global_h(induced).chi, order)


def test_float_backend_agrees_with_exact():
    for seed in range(25):
        inst = random_instance(20_000 + seed)
        exact = riemann_hurwitz_check(inst.system, inst.cover)
        fl = riemann_hurwitz_check(inst.system.to_float(), inst.cover)
        assert abs(float(fl.lhs - fl.rhs)) <= 1e-9
        assert global_h(inst.system.to_float()).dims == global_h(inst.system).dims
        assert fl.lhs == exact.lhs


def test_unipotent_models_agree():
    for seed in range(30):
        inst = random_instance(30_000 + seed, unipotent=True)
        assert not compare_models(inst.system, inst.cover).diverge


def test_character_family_torus():
    surface = SurfaceData.make(1, 0)
    cover = CoveringDatum(surface, AbelianRank(1), ((1,), (0,)))
    fam = character_family(trivial_system(surface), cover, samples=16, seed=1)
    assert fam.generic == (0, 0, 0)
    assert fam.samples[0].dims == (1, 2, 1)
    assert all(all(x >= g for x, g in zip(s.dims, fam.generic)) for s in fam.samples)
    rep = torsion_report(fam)
    assert rep.torsion_present and rep.locus == ((0.0,),) and rep.von_neumann == (0, 0, 0)


def test_character_family_generically_twisted():
    surface = SurfaceData.make(1, 0)
    theta = math.sqrt(2) * math.pi
    twisted = LocalSystem.build(surface, [Matrix.from_rows([[cmath.exp(1j * theta)]], exact=False),
                                          Matrix.identity(1, exact=False)])
    cover = CoveringDatum(surface, AbelianRank(1), ((1,), (0,)))
    fam = character_family(twisted, cover, samples=16, seed=2)
    assert fam.generic == (0, 0, 0) and not fam.jumps
    assert not torsion_report(fam).torsion_present


def test_character_family_needs_abelian_cover():
    with pytest.raises(CoveringError):
        character_family(trivial_system(SPHERE3), Z2_COVER)


def test_skyscraper_examples():
    assert skyscraper_summand(SkyscraperDatum({})).dims == (0, 0, 0)
    rep = skyscraper_summand(SkyscraperDatum({"p": 3}), Z2_COVER)
    assert rep.dims == (3, 0, 0) and rep.normalization == "vonNeumann"
    assert skyscraper_summand(SkyscraperDatum({"p": 1, "q": 2})).dims == (3, 0, 0)


def test_trivial_group_collapse():
    for seed in range(20):
        inst = random_instance(40_000 + seed, trivial_group_cover=True)
        base = global_h(inst.system).dims
        for model in (EXT_OF_PULLBACK, PULLBACK_OF_EXT):
            assert l2_cohomology_finite(inst.system, inst.cover, model).dims == base
    assert trivial_covering(SPHERE3).group == trivial_group()
