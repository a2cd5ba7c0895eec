"""Approximate truncated SVDs of blur operators from Kronecker sum decompositions.

The operator ``K = sum_i A_i kron B_i`` is handled through the exact SVD of its
first term plus a small dense ``k x k`` core, never materializing ``K``.
"""

__version__ = "0.1.0"

from .baseline import BaselineTsvd, baseline_build, baseline_pinv_apply
from .bounds import (
    BoundReport,
    BoundValue,
    bound_sweep,
    evaluate_bounds,
    gap_blocks,
    noise_subspace_bound,
    pinv_bound,
    signal_subspace_bound,
    solution_bound,
)
from .exceptions import CapacityError, DimensionError, ParseError, materialization_cap
from .kron_core import KronPair, kron_apply, kron_dense, kron_sum_apply, kron_sum_dense, unvec, vec
from .krylov import LinearOperator, SolveReport, cgls, make_preconditioner, pcgls
from .ksum import KroneckerSum, Psf, laplacian_2d, psf_kron_sum, rearrange, vlp_decompose
from .oracle import DenseSvdTriple, dense_svd, dense_tsvd_solution
from .problems import BlurProblem, blur_adjoint, blur_apply, blur_matrix, make_problem
from .regularization import FilterSpec, filter_factors, filtered_solve
from .serialize import load_kron_sum, load_tsvd, save_kron_sum, save_tsvd
from .tsvd import ImplicitTsvd, build, expand, project, tsvd_apply, tsvd_pinv_apply

__all__ = [
    "__version__",
    "BaselineTsvd", "baseline_build", "baseline_pinv_apply",
    "BoundReport", "BoundValue", "bound_sweep", "evaluate_bounds", "gap_blocks",
    "noise_subspace_bound", "pinv_bound", "signal_subspace_bound", "solution_bound",
    "CapacityError", "DimensionError", "ParseError", "materialization_cap",
    "KronPair", "kron_apply", "kron_dense", "kron_sum_apply", "kron_sum_dense", "unvec", "vec",
    "LinearOperator", "SolveReport", "cgls", "make_preconditioner", "pcgls",
    "KroneckerSum", "Psf", "laplacian_2d", "psf_kron_sum", "rearrange", "vlp_decompose",
    "DenseSvdTriple", "dense_svd", "dense_tsvd_solution",
    "BlurProblem", "blur_adjoint", "blur_apply", "blur_matrix", "make_problem",
    "FilterSpec", "filter_factors", "filtered_solve",
    "load_kron_sum", "load_tsvd", "save_kron_sum", "save_tsvd",
    "ImplicitTsvd", "build", "expand", "project", "tsvd_apply", "tsvd_pinv_apply",
]
