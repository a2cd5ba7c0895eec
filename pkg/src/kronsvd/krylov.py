"""CGLS and preconditioned CGLS for damped least squares.

Both solve::

    min_x ||K x - d||**2 + alpha**2 ||x||**2

PCGLS substitutes ``x = M^{-1} y`` (right preconditioning) and runs CGLS on
``y``; iteration counts refer to outer CG iterations. Convergence is declared
when the normal-equation residual of the damped problem,
``||K^T (d - K x) - alpha**2 x||``, has dropped by ``tol`` relative to its
value at ``x = 0``. The same measure is used with and without a
preconditioner so iteration counts are comparable.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError
from .kron_core import kron_sum_apply
from .problems import blur_adjoint, blur_apply

__all__ = [
    "LinearOperator",
    "SolveReport",
    "identity_operator",
    "dense_operator",
    "ksum_operator",
    "psf_operator",
    "make_preconditioner",
    "cgls",
    "pcgls",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearOperator:
    """Square operator given by its forward and adjoint actions."""

    dim: int
    apply: object
    apply_transpose: object
    name: str = "operator"
    skipped: int = 0

    def __matmul__(self, x):
        return self.apply(x)


def identity_operator(dim):
    def ident(x):
        return np.array(x, dtype=np.float64, copy=True)

    return LinearOperator(dim, ident, ident, "identity")


def dense_operator(K):
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {K.shape}")
    return LinearOperator(K.shape[0], lambda x: K @ x, lambda x: K.T @ x, "dense")


def ksum_operator(ksum):
    return LinearOperator(
        ksum.N,
        lambda x: kron_sum_apply(ksum, x),
        lambda x: kron_sum_apply(ksum, x, transpose=True),
        "kronecker-sum",
    )


def psf_operator(psf):
    n = psf.n

    def fwd(x):
        return blur_apply(psf, x.reshape((n, n), order="F")).ravel(order="F")

    def adj(x):
        return blur_adjoint(psf, x.reshape((n, n), order="F")).ravel(order="F")

    return LinearOperator(n * n, fwd, adj, "psf-blur")


@dataclass
class SolveReport:
    """Outcome of a (P)CGLS run.

    ``residual_history[j]`` is the normal-equation residual norm after
    iteration ``j + 1``; ``initial_residual`` is its value at ``x = 0``.
    ``damped_residual_history`` tracks ``||[d - K x; -alpha x]||`` likewise.
    """

    x: np.ndarray
    iterations: int
    residual_history: list
    converged: bool
    initial_residual: float = 0.0
    damped_residual_history: list = field(default_factory=list)
    iterates: list = None
    message: str = ""


def make_preconditioner(tsvd, alpha=0.0, k=None, floor=1e-10):
    """``M^{-1} = V diag(g) V^T + (I - V V^T)`` from an approximate factorization.

    ``g_i = 1 / sqrt(sigma_i**2 + alpha**2)`` on the retained right singular
    vectors ``V``. Entries that are nonpositive or below ``floor * |sigma_1|``
    keep ``g_i = 1`` (identity on that direction); their count is stored in
    ``skipped``.

    Parameters
    ----------
    tsvd : ImplicitTsvd or BaselineTsvd or DenseSvdTriple
    alpha : float
        Damping parameter of the least-squares problem.
    k : int, optional
        Number of leading spectral terms to use; defaults to all the
        factorization carries.
    """
    sig = np.asarray(tsvd.sigma, dtype=np.float64)
    k = sig.size if k is None else int(k)
    if not 0 <= k <= sig.size:
        raise ValueError(f"k must be in [0, {sig.size}], got {k}")
    N = tsvd.N
    if k == 0:
        return identity_operator(N)
    s = sig[:k]
    lead = abs(s[0]) if s.size else 0.0
    ok = (s > 0) & (s >= floor * lead)
    g = np.ones(k)
    g[ok] = 1.0 / np.sqrt(s[ok] ** 2 + alpha ** 2)
    skipped = int(np.count_nonzero(~ok))
    if skipped:
        log.warning("preconditioner: %d of %d spectral terms left uninverted", skipped, k)
    m = sig.size

    def apply(v):
        y = tsvd.project(v, "right")
        y = y[:k]
        z = np.zeros(m)
        z[:k] = (g - 1.0) * y
        return v + tsvd.expand(z, "right")

    return LinearOperator(N, apply, apply, f"spectral(k={k})", skipped)


def cgls(op, d, alpha=0.0, tol=1e-6, maxit=200, keep_iterates=False):
    """Conjugate gradients on the damped normal equations."""
    return pcgls(op, d, alpha, None, tol, maxit, keep_iterates)


def pcgls(op, d, alpha=0.0, precond=None, tol=1e-6, maxit=200, keep_iterates=False):
    """Right-preconditioned CGLS; ``precond`` is the action of ``M^{-1}`` (symmetric)."""
    if maxit < 1:
        raise ValueError(f"maxit must be >= 1, got {maxit}")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (op.dim,):
        raise DimensionError(f"expected data of length {op.dim}, got shape {d.shape}")
    alpha2 = float(alpha) ** 2
    if precond is None:
        def minv(v):
            return v
    else:
        if precond.dim != op.dim:
            raise DimensionError("preconditioner and operator dimensions differ")
        minv = precond.apply

    x = np.zeros(op.dim)
    r = d.copy()
    normal = op.apply_transpose(r)
    s = minv(normal)
    p = s.copy()
    gamma = float(s @ s)
    norm0 = float(np.linalg.norm(normal))
    report = SolveReport(x, 0, [], False, norm0, [], [] if keep_iterates else None)
    if norm0 == 0.0:
        report.converged = True
        report.message = "zero initial residual"
        return report

    for it in range(1, maxit + 1):
        t = minv(p)
        q = op.apply(t)
        delta = float(q @ q) + alpha2 * float(t @ t)
        if delta <= 0.0 or gamma == 0.0 or not np.isfinite(delta):
            report.message = f"breakdown at iteration {it}: zero curvature"
            break
        a = gamma / delta
        x = x + a * t
        r = r - a * q
        normal = op.apply_transpose(r) - alpha2 * x
        s = minv(normal)
        gamma_new = float(s @ s)
        res = float(np.linalg.norm(normal))
        report.iterations = it
        report.residual_history.append(res)
        report.damped_residual_history.append(
            float(np.sqrt(r @ r + alpha2 * (x @ x)))
        )
        if keep_iterates:
            report.iterates.append(x.copy())
        if res <= tol * norm0:
            report.converged = True
            break
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new

    report.x = x
    if not report.converged and not report.message:
        report.message = f"no convergence in {maxit} iterations"
    return report
