"""Exact-arithmetic differential graded Lie algebras over Q.

Graded vector spaces and chain complexes with rational Gaussian elimination,
dg-Lie algebras by structure constants, cones and truncated free algebras,
universal enveloping algebras with the PBW filtration, homological and
cohomological Chevalley-Eilenberg complexes, and desk-scale deformation
functors via the Maurer-Cartan equation over local artinian test algebras.

A bundled catalog of algebras lives under ``dglie.catalog``; the ``dglie``
command-line tool drives everything from JSON documents.
"""

from .core import (
    ChainComplex,
    ChainMap,
    GradedLinearMap,
    GradedVectorSpace,
    braiding,
    graded_dual,
    homology,
    homology_dims,
    is_quasi_iso,
    shift,
    tensor,
)
from .dgla import (
    DgLieAlgebra,
    DgLieMorphism,
    FreeDglaPresentation,
    cone,
    disc_and_boundary,
    free_dgla,
    generating_cofibration,
    is_fibration,
    is_weak_equivalence,
    validate_dgla,
)
from .envelope import (
    DgAlgebra,
    FilteredEnvelope,
    associated_graded,
    commutator_lie,
    sym_component_dims,
    sym_vs_gr_check,
    universal_enveloping,
    validate_dg_algebra,
)
from .ce import (
    CEChainComplex,
    CECochainAlgebra,
    ce_chain_complex,
    ce_cochain_algebra,
    ce_homology,
    filtration,
    induced_chain_map,
)
from .moduli import (
    ArtinAlgebra,
    AlgebraSurjection,
    DeformationValue,
    Presentation,
    fiber_product,
    gauge_quotient,
    mc_elements,
    mc_fiber_product_check,
    smallness_certificate,
    spec_points,
    square_zero_algebra,
    tangent_space,
    tensor_dgla,
    truncated_polynomial_algebra,
    validate_artin,
    zariski_tangent,
)

__version__ = "0.1.0"

__all__ = [
    "ChainComplex", "ChainMap", "GradedLinearMap", "GradedVectorSpace",
    "braiding", "graded_dual", "homology", "homology_dims", "is_quasi_iso",
    "shift", "tensor",
    "DgLieAlgebra", "DgLieMorphism", "FreeDglaPresentation", "cone",
    "disc_and_boundary", "free_dgla", "generating_cofibration", "is_fibration",
    "is_weak_equivalence", "validate_dgla",
    "DgAlgebra", "FilteredEnvelope", "associated_graded", "commutator_lie",
    "sym_component_dims", "sym_vs_gr_check", "universal_enveloping",
    "validate_dg_algebra",
    "CEChainComplex", "CECochainAlgebra", "ce_chain_complex",
    "ce_cochain_algebra", "ce_homology", "filtration", "induced_chain_map",
    "ArtinAlgebra", "AlgebraSurjection", "DeformationValue", "Presentation",
    "fiber_product", "gauge_quotient", "mc_elements", "mc_fiber_product_check",
    "smallness_certificate", "spec_points", "square_zero_algebra",
    "tangent_space", "tensor_dgla", "truncated_polynomial_algebra",
    "validate_artin", "zariski_tangent",
]
