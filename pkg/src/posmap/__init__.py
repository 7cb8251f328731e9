"""Positive linear maps on matrix algebras.

Builds block-matrix positivity certificates, six families of positive maps,
their Choi-matrix entanglement witnesses, companion PPT detector states,
and the zero-product spanning sets behind optimality and nd-optimality.
A self-contained Hermitian eigensolver backs every verdict; a compiled
kernel is used when available, with a pure-Python twin as fallback.
"""

__version__ = "0.1.0"

from .eigen import BACKEND, hermitian_eigh, hermitian_eigvals
from .linalg import (
    BipartiteDims,
    DEFAULT_TOL,
    Tolerance,
    assemble_block2,
    dagger,
    haar_unitary,
    hermitian_eigenvalues,
    hermiticity_defect,
    is_psd,
    kron,
    matrix_unit,
    min_eigenvalue,
    partial_transpose,
    random_unit_vector,
    schur_positivity,
)
from .blockcert import (
    BlockSpec,
    ConditionReport,
    InductiveCertificate,
    StepCheck,
    assemble,
    check_conditions,
    inductive_certify,
    random_antisymmetric_spec,
    random_phase_table,
    random_scalar_spec,
)
from .maps import (
    FAMILIES,
    LinearMap,
    MapSpec,
    SIGMA_Y,
    ScanResult,
    build,
    default_antisymmetric_unitary,
    phase_table,
    positivity_scan,
    random_antisymmetric_unitary,
    zeta,
)
from .witness import (
    DetectionReport,
    NdOptimalityReport,
    NecessityViolation,
    PptDetector,
    Witness,
    ZeroProductSet,
    antisymmetric_conjugation_identity,
    build_ppt_detector,
    detected_left_conjugation,
    detection_value,
    expectation_product,
    nd_optimality_check,
    optimality_zero_set,
)

__all__ = [
    "BACKEND",
    "BipartiteDims",
    "BlockSpec",
    "ConditionReport",
    "DEFAULT_TOL",
    "DetectionReport",
    "FAMILIES",
    "InductiveCertificate",
    "LinearMap",
    "MapSpec",
    "NdOptimalityReport",
    "NecessityViolation",
    "PptDetector",
    "SIGMA_Y",
    "ScanResult",
    "StepCheck",
    "Tolerance",
    "Witness",
    "ZeroProductSet",
    "antisymmetric_conjugation_identity",
    "assemble",
    "assemble_block2",
    "build",
    "build_ppt_detector",
    "check_conditions",
    "dagger",
    "default_antisymmetric_unitary",
    "detected_left_conjugation",
    "detection_value",
    "expectation_product",
    "haar_unitary",
    "hermitian_eigenvalues",
    "hermitian_eigh",
    "hermitian_eigvals",
    "hermiticity_defect",
    "inductive_certify",
    "is_psd",
    "kron",
    "matrix_unit",
    "min_eigenvalue",
    "nd_optimality_check",
    "optimality_zero_set",
    "partial_transpose",
    "phase_table",
    "positivity_scan",
    "random_antisymmetric_spec",
    "random_antisymmetric_unitary",
    "random_phase_table",
    "random_scalar_spec",
    "random_unit_vector",
    "schur_positivity",
    "zeta",
]
