"""subdioph: exact heights, canonical angles, and approximation exponents
for rational subspaces of R^n."""

from .angles import (
    AngleProfile,
    PrecisionContext,
    RealBasis,
    angles_adaptive,
    principal_angles,
    random_orthogonal,
    vector_angle,
)
from .construction import (
    FINITE,
    INFINITE,
    ConstructionParams,
    InstanceCertification,
    build_convergent,
    build_generators,
    certify_instance,
    params_from_descriptor,
    params_to_descriptor,
)
from .enumeration import (
    BASIS_BOX,
    EXACT_LINES,
    EXACT_PLUECKER,
    EnumSpec,
    enumerate_lines,
    enumerate_subspaces,
)
from .errors import SubdiophError
from .estimation import (
    ApproximationRecord,
    ExponentEstimate,
    estimate_exponent,
    exclusivity_check,
    golden_line_target,
    line_target_for_instance,
    records_from_certification,
    scan_embedded_line_records,
    scan_line_records,
    scan_records,
)
from .exact import (
    PlueckerVector,
    RationalSubspace,
    block_determinant,
    compound_matrix,
    generalized_determinant_squared,
    height_squared,
    is_primitive_basis,
    padic_valuation,
    pluecker_coordinates,
    pluecker_decode,
)
from .morphisms import (
    HarnessReport,
    RationalMap,
    apply_to_subspace,
    ceil_sqrt,
    coordinate_embedding,
    embedding_harness,
    height_distortion_constant,
    identity_map,
    section_of,
)
from .reports import emit_report

__all__ = [
    "AngleProfile",
    "ApproximationRecord",
    "BASIS_BOX",
    "ConstructionParams",
    "EXACT_LINES",
    "EXACT_PLUECKER",
    "EnumSpec",
    "ExponentEstimate",
    "FINITE",
    "HarnessReport",
    "INFINITE",
    "InstanceCertification",
    "PlueckerVector",
    "PrecisionContext",
    "RationalMap",
    "RationalSubspace",
    "RealBasis",
    "SubdiophError",
    "angles_adaptive",
    "apply_to_subspace",
    "block_determinant",
    "build_convergent",
    "build_generators",
    "ceil_sqrt",
    "certify_instance",
    "compound_matrix",
    "coordinate_embedding",
    "embedding_harness",
    "emit_report",
    "enumerate_lines",
    "enumerate_subspaces",
    "estimate_exponent",
    "exclusivity_check",
    "generalized_determinant_squared",
    "golden_line_target",
    "height_distortion_constant",
    "height_squared",
    "identity_map",
    "is_primitive_basis",
    "line_target_for_instance",
    "padic_valuation",
    "params_from_descriptor",
    "params_to_descriptor",
    "pluecker_coordinates",
    "pluecker_decode",
    "principal_angles",
    "random_orthogonal",
    "records_from_certification",
    "scan_embedded_line_records",
    "scan_line_records",
    "scan_records",
    "section_of",
    "vector_angle",
]

__version__ = "0.1.0"
