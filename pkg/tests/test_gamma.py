import random
from fractions import Fraction

import pytest

from l2vhs.errors import ComplexError
from l2vhs.gamma import (
    GammaComplex,
    GammaModule,
    averaging_idempotent,
    complex_cohomology_dims,
    cone,
    conjugate_complex,
    coset_module,
    identity_maps,
    image_module,
    kernel_module,
    random_chain_map,
    random_complex,
    random_idempotent,
    right_mult,
    torsion_report,
    vn_dim,
    zero_maps,
)
from l2vhs.cohomology import CharacterFamily, CharacterSample
from l2vhs.groups import cyclic_group, dihedral_group, element_order, symmetric_group
from l2vhs.numeric import Matrix, rank

GROUPS = [cyclic_group(2), cyclic_group(3), cyclic_group(4), symmetric_group(3), dihedral_group(4), cyclic_group(6),
          dihedral_group(6)]


def two_term(group, mat):
    free = GammaModule.free(group, 1)
    return GammaComplex((free, free), (mat,), 0)


def test_vn_dim_examples():
    for group in GROUPS:
        for h in group.elements():
            assert vn_dim(coset_module(group, h)) == Fraction(1, element_order(group, h))
        assert vn_dim(GammaModule.free(group, 3)) == 3
        assert vn_dim(GammaModule.zero(group)) == 0


def test_non_equivariant_projection_rejected():
    z2 = cyclic_group(2)
    with pytest.raises(ComplexError):
        GammaModule.from_projection(z2, 1, Matrix.diag([1, 0]))


def test_cohomology_examples():
    z2 = cyclic_group(2)
    zero = two_term(z2, Matrix.zeros(2, 2))
    assert complex_cohomology_dims(zero) == [1, 1]
    ident = two_term(z2, Matrix.identity(2))
    assert complex_cohomology_dims(ident) == [0, 0]
    g_minus_e = right_mult(z2, [[{1: 1, 0: -1}]])
    assert complex_cohomology_dims(two_term(z2, g_minus_e)) == [Fraction(1, 2), Fraction(1, 2)]


def test_cone_examples():
    z2 = cyclic_group(2)
    ident = two_term(z2, Matrix.identity(2))
    g_minus_e = two_term(z2, right_mult(z2, [[{1: 1, 0: -1}]]))
    assert all(d == 0 for d in complex_cohomology_dims(cone(g_minus_e, g_minus_e, identity_maps(g_minus_e))))
    # f = 0: cone is C0[1] + C1, so cohomology adds
    c = cone(g_minus_e, ident, zero_maps(g_minus_e, ident))
    assert sum(complex_cohomology_dims(c)) == sum(complex_cohomology_dims(g_minus_e))
    # quasi-isomorphism between the two acyclic 2-term complexes 0 -> C -id-> C -> 0
    assert all(d == 0 for d in complex_cohomology_dims(cone(ident, ident, identity_maps(ident))))


def test_d_squared_rejected():
    z2 = cyclic_group(2)
    free = GammaModule.free(z2, 1)
    with pytest.raises(ComplexError):
        GammaComplex((free, free, free), (Matrix.identity(2), Matrix.identity(2)), 0)


@pytest.mark.parametrize("seed", range(8))
def test_random_complex_properties(seed):
    rng = random.Random(seed)
    group = GROUPS[seed % len(GROUPS)]
    c = random_complex(group, rng)
    dims = complex_cohomology_dims(c)
    assert sum((-1) ** i * d for i, d in enumerate(dims)) == c.euler()
    assert complex_cohomology_dims(conjugate_complex(c, rng)) == dims
    target, maps = random_chain_map(c, rng)
    cn = cone(c, target, maps)
    assert cn.euler() == target.euler() - c.euler()
    assert all(d == 0 for d in complex_cohomology_dims(cone(c, c, identity_maps(c))))


@pytest.mark.parametrize("seed", range(6))
def test_short_exact_additivity(seed):
    """0 -> ker p -> C[G]^m -> im p -> 0 for a random equivariant idempotent p."""
    rng = random.Random(100 + seed)
    group = GROUPS[seed % len(GROUPS)]
    m = rng.randint(1, 3)
    p = random_idempotent(group, m, rng)
    free = GammaModule.free(group, m)
    ker = kernel_module(group, p, free)
    img = image_module(group, p, free, m)
    assert vn_dim(ker) + vn_dim(img) == vn_dim(free)
    assert (vn_dim(img) == 0) == (rank(p) == 0)


def test_averaging_idempotent_is_coset_projection():
    group = symmetric_group(3)
    for h in group.elements():
        e = averaging_idempotent(group, h)
        assert (e @ e).equals(e)
        assert vn_dim(GammaModule.from_projection(group, 1, e)) == Fraction(1, element_order(group, h))


def _family(dims_list):
    samples = tuple(CharacterSample((i / 10,), d) for i, d in enumerate(dims_list))
    generic = tuple(min(s.dims[i] for s in samples) for i in range(3))
    jumps = tuple(s for s in samples if any(x > g for x, g in zip(s.dims, generic)))
    return CharacterFamily(1, generic, generic, samples, jumps)


def test_torsion_report_examples():
    assert not torsion_report(_family([(0, 0, 0)] * 4)).torsion_present
    rep = torsion_report(_family([(1, 2, 1), (0, 0, 0), (0, 1, 1), (0, 0, 0)]))
    assert rep.torsion_present and rep.locus == ((0.0,), (0.2,))
    assert rep.von_neumann == (0, 0, 0)
