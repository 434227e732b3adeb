"""Exact-arithmetic spectral sequences for finite group actions on finite complexes."""

from .exact_linalg import FGModule, IntMatrix, Ring, ZZ, Zmod, cokernel, smith_normal_form, subquotient
from .complexes import CochainComplex, ComplexMap, cohomology, induced_map_on_cohomology
from .spectral import DoubleComplex, SSPage, associated_graded_check, page, stable_page, total_complex
from .groupcoh import (
    FiniteGroup,
    GModule,
    Resolution,
    bar_resolution,
    group_cohomology,
    hom_rg,
    invariants,
    periodic_resolution,
)
from .gspace import SimplicialGComplex, cochains, cohomology_gmodule, regularize
from .borel import BorelSpace, borel_cohomology, borel_space, eg_skeleton
from .swan import ComparisonReport, SwanScenario, build_swan, compare, grothendieck_e2
from .bisubdiv import (
    AffineBisimplex,
    BiChain,
    ConvexCover,
    boundary,
    homotopy_rho,
    small_chain_retraction,
    smallness_index,
    subdivide,
)

__version__ = "0.1.0"
