"""
Operator algebra on H1 ⊗ H2: dense primitives, block layout and lifted projectors.
"""

from whichslit.operators.algebra import (
    ProjectorReport,
    as_matrix,
    as_square,
    as_vector,
    commutator,
    frobenius,
    hermitian_basis,
    is_projector,
    ket_projector,
    normalize,
    projector_rank,
    tensor_product,
)
from whichslit.operators.layout import (
    CAVITIES,
    BlockState,
    CavityDecomposition,
    ExpectedImages,
    CompatibilityReport,
    SlitLayout,
    assemble_state,
    expected_images,
    compatibility_report,
    h2_vector,
    permute_cavities,
)
from whichslit.operators.lifting import LiftedOperators, lift_operators

__all__ = [
    "CAVITIES",
    "BlockState",
    "CavityDecomposition",
    "ExpectedImages",
    "CompatibilityReport",
    "LiftedOperators",
    "ProjectorReport",
    "SlitLayout",
    "as_matrix",
    "as_square",
    "as_vector",
    "assemble_state",
    "commutator",
    "expected_images",
    "frobenius",
    "compatibility_report",
    "h2_vector",
    "hermitian_basis",
    "is_projector",
    "ket_projector",
    "lift_operators",
    "normalize",
    "permute_cavities",
    "projector_rank",
    "tensor_product",
]
