"""Banded block operators on mixed-norm sequence spaces.

Core objects: SpaceSpec (an ell^p sum of Euclidean blocks), MixedVector,
and BlockBandedOperator.  On top of those: certified operator norm
estimation for any exponent, greedy cut-point selection with
block-tridiagonal compression, exponent transfer of block data, winding
versus truncated Fredholm indices, and Rademacher embedding constants.
"""

__version__ = "0.1.0"

from ._core import backend as kernel_backend
from .space import (
    MixedVector,
    SpaceSpec,
    block_norms,
    block_project,
    duality_map,
    load_vectors_csv,
    mixed_norm,
    pairing,
    prefix_project,
    save_vectors_csv,
)
from .symbols import LaurentPolynomial, random_laurent
from .blockop import (
    BlockBandedOperator,
    backward_shift_matrix,
    diagonal_sum_bound,
    forward_shift_matrix,
    from_dense,
    load_operator,
    norm_sandwich,
    save_dense_csv,
    save_operator,
    toeplitz,
)
from .pnorm import NormBudget, NormEstimate, brute_force_norm, estimate_norm
from .tridiag import (
    CutPlan,
    CutPlanExhausted,
    TridiagReport,
    choose_cuts,
    compress,
    default_schedule,
    load_plan,
    save_plan,
    tridiagonalize_family,
    verify_tridiag_error,
)
from .transfer import (
    CalculusExperiment,
    TransferBoundError,
    TransferResult,
    essential_norm_proxy,
    rebind_exponent,
    run_calculus_experiment,
    run_transfer_pipeline,
    window_blocks,
    windowed,
)
from .fredholm import (
    IndexReport,
    PathConstancy,
    PathRejected,
    SymbolPath,
    TruncationIndexResult,
    index_report,
    path_index_constancy,
    truncation_index,
    winding,
)
from .rademacher import (
    EmbeddingConstants,
    RademacherSystem,
    embed,
    measure_constants,
    project,
)

__all__ = [
    "__version__",
    "kernel_backend",
    "SpaceSpec",
    "MixedVector",
    "mixed_norm",
    "block_norms",
    "duality_map",
    "block_project",
    "prefix_project",
    "pairing",
    "save_vectors_csv",
    "load_vectors_csv",
    "LaurentPolynomial",
    "random_laurent",
    "BlockBandedOperator",
    "norm_sandwich",
    "diagonal_sum_bound",
    "from_dense",
    "toeplitz",
    "forward_shift_matrix",
    "backward_shift_matrix",
    "save_operator",
    "load_operator",
    "save_dense_csv",
    "NormBudget",
    "NormEstimate",
    "estimate_norm",
    "brute_force_norm",
    "CutPlan",
    "CutPlanExhausted",
    "TridiagReport",
    "default_schedule",
    "choose_cuts",
    "compress",
    "verify_tridiag_error",
    "tridiagonalize_family",
    "save_plan",
    "load_plan",
    "rebind_exponent",
    "windowed",
    "window_blocks",
    "essential_norm_proxy",
    "TransferResult",
    "TransferBoundError",
    "CalculusExperiment",
    "run_transfer_pipeline",
    "run_calculus_experiment",
    "winding",
    "truncation_index",
    "TruncationIndexResult",
    "IndexReport",
    "index_report",
    "SymbolPath",
    "PathConstancy",
    "PathRejected",
    "path_index_constancy",
    "RademacherSystem",
    "EmbeddingConstants",
    "embed",
    "project",
    "measure_constants",
]
