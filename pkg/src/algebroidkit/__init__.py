"""algebroidkit: exact-arithmetic verification and construction kit for
homotopy Lie algebroids over graded commutative dgas, their dual degree-1
derivations on truncated symmetric algebras, and the formal-neighborhood
differential assembled from finite curvature/splitting data.

Everything is computed over the Gaussian rationals; no floating point enters
any result.
"""

from .scalars import Scalar
from .signs import Permutation, enumerate_unshuffles, skew_sign, sym_sign
from .algebra import AlgebraElement, BaseAlgebra, validate_base_algebra
from .modules import FreeModule, ModuleElement, validate_module
from .symtensor import (
    DerivationD,
    FilteredAutomorphism,
    SymAlgebra,
    SymElement,
    conjugate,
    d0_derivation,
    evaluate,
    extend_derivation,
    from_values,
    mc_residual,
    square_components,
)
from .linfty import (
    AlgebraDerivation,
    LInftyAlgebra,
    LInftyMorphism,
    LInftyOneAlgebra,
    ShiftedDerDGLA,
    build_shifted_der_dgla,
    decalage,
    decalage_inverse,
    jacobi_residual,
    jacobi_residual_skew,
    morphism_residual,
)
from .algebroid import (
    AlgebroidStructure,
    algebroid_jacobi_residual,
    anchor_morphism_residual,
    ce_differential,
    extract_structure,
    leibniz_residual,
)
from .geometry import (
    GeometricModel,
    Splitting,
    build_frakD,
    build_kapranov,
    commutator_lemma_residual,
    duality_residual,
    frakD_square_report,
    pi_tilde,
    retraction_residual,
    split_curvature,
    structure_from_geometry,
    sym_bar,
    transport_lemma_residual,
    validate_geometric_model,
)
from .modelio import load_model, parse_model, serialize_model
from .reports import CheckResult, Report

__all__ = [
    "Scalar",
    "Permutation",
    "enumerate_unshuffles",
    "sym_sign",
    "skew_sign",
    "AlgebraElement",
    "BaseAlgebra",
    "validate_base_algebra",
    "FreeModule",
    "ModuleElement",
    "validate_module",
    "SymAlgebra",
    "SymElement",
    "DerivationD",
    "FilteredAutomorphism",
    "evaluate",
    "from_values",
    "extend_derivation",
    "d0_derivation",
    "square_components",
    "conjugate",
    "mc_residual",
    "LInftyAlgebra",
    "LInftyOneAlgebra",
    "LInftyMorphism",
    "AlgebraDerivation",
    "ShiftedDerDGLA",
    "build_shifted_der_dgla",
    "decalage",
    "decalage_inverse",
    "jacobi_residual",
    "jacobi_residual_skew",
    "morphism_residual",
    "AlgebroidStructure",
    "ce_differential",
    "extract_structure",
    "algebroid_jacobi_residual",
    "leibniz_residual",
    "anchor_morphism_residual",
    "GeometricModel",
    "Splitting",
    "validate_geometric_model",
    "split_curvature",
    "sym_bar",
    "pi_tilde",
    "retraction_residual",
    "commutator_lemma_residual",
    "transport_lemma_residual",
    "build_frakD",
    "frakD_square_report",
    "build_kapranov",
    "structure_from_geometry",
    "duality_residual",
    "parse_model",
    "serialize_model",
    "load_model",
    "Report",
    "CheckResult",
]

__version__ = "0.1.0"
