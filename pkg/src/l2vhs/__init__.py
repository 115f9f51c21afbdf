"""L2 cohomology of local systems on punctured Riemann surfaces and their finite covers."""
from .cohomology import (
    CohomologyReport,
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
from .config import DEFAULT, Config
from .errors import InputError, InvariantFailure, L2Error
from .gamma import GammaComplex, GammaModule, complex_cohomology_dims, cone, torsion_report, vn_dim
from .groups import AbelianRank, FiniteGroup, cyclic_group, dihedral_group, symmetric_group, trivial_group
from .io import InputDocument, Report, parse_document, parse_input, render_document
from .numeric import GaussianRational, Matrix, eig_unit_circle, format_scalar, parse_scalar
from .surface import CoveringDatum, SurfaceData, riemann_hurwitz_classical, validate_covering
from .weights import (
    LocalType,
    WeightFiltration,
    check_weight_axioms,
    growth_exponents,
    lattice_dims,
    local_h0,
    local_type,
    pullback_local_type,
    weight_filtration,
)

__version__ = "0.1.0"
