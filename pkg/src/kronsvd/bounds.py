"""Desk-scale evaluation of subspace, pseudoinverse and solution error bounds.

Writing the operator in the approximate singular bases,
``K = U_hat [[S_t, W12_hat], [W21_hat, S0 + W22]] V_hat^T``, the bounds are
functions of the off-diagonal blocks and of the true spectrum. All routines
here materialize ``N x N`` matrices and respect the materialization cap.

Bounds whose hypotheses fail are returned as a :class:`BoundValue` with
``valid=False`` rather than as a (meaningless, possibly negative) number.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import spectral_norm
from .exceptions import DimensionError, check_cap
from .oracle import dense_svd, dense_tsvd_solution

__all__ = [
    "PHI",
    "BoundValue",
    "GapBlocks",
    "BoundReport",
    "gap_blocks",
    "signal_subspace_bound",
    "noise_subspace_bound",
    "pinv_bound",
    "solution_bound",
    "true_subspace_distance",
    "approx_bases",
    "evaluate_bounds",
    "bound_sweep",
]

PHI = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class BoundValue:
    """A bound value tagged with whether its hypotheses held."""

    value: float
    valid: bool = True
    reason: str = ""

    def __float__(self):
        return float(self.value)

    @classmethod
    def invalid(cls, reason):
        return cls(math.nan, False, reason)

    def holds_for(self, true_value, slack=1e-9):
        """True when the bound is valid and covers ``true_value`` up to ``slack``."""
        return self.valid and true_value <= self.value + slack


@dataclass(frozen=True)
class GapBlocks:
    """Blocks of the operator expressed in the reordered first-term bases.

    ``w11 .. w22`` partition ``P^T W P`` at the truncation index ``k``;
    ``rotated`` is the whole matrix ``U_hat^T K V_hat`` whose leading block is
    ``diag(s_t)``, used to re-partition at smaller effective ranks.
    """

    k: int
    w11: np.ndarray
    w12: np.ndarray
    w21: np.ndarray
    w22: np.ndarray
    w12_hat: np.ndarray
    w21_hat: np.ndarray
    sigma0_hat: np.ndarray
    rotated: np.ndarray

    @property
    def trailing(self):
        """``Sigma0_hat + W22``."""
        return np.diag(self.sigma0_hat) + self.w22

    def partition(self, effective_k=None):
        """``(W12_hat, W21_hat, trailing block)`` at an effective rank ``<= k``."""
        e = self.k if effective_k is None else int(effective_k)
        if not 1 <= e <= self.k:
            raise ValueError(f"effective_k must be in [1, {self.k}], got {e}")
        if e == self.k:
            return self.w12_hat, self.w21_hat, self.trailing
        M = self.rotated
        return M[:e, e:], M[e:, :e], M[e:, e:]


def _first_term_bases(tsvd):
    """Dense ``U_1 P`` and ``V_1 P`` (columns in sorted Kronecker order)."""
    N = tsvd.N
    pick = np.eye(N)[:, tsvd.perm.map]
    return tsvd.fsvd.apply_u(pick), tsvd.fsvd.apply_v(pick)


def gap_blocks(k_dense, tsvd):
    """Partition ``P^T U_1^T (K - A_1 kron B_1) V_1 P`` at ``tsvd.k``."""
    K = np.asarray(k_dense, dtype=np.float64)
    N = tsvd.N
    if K.shape != (N, N):
        raise DimensionError(f"expected a {N}x{N} operator, got shape {K.shape}")
    check_cap(N, "operator")
    k = tsvd.k
    ubar, vbar = _first_term_bases(tsvd)
    sig_sorted = tsvd.fsvd.kron_diagonal()[tsvd.perm.map]
    W = ubar.T @ K @ vbar - np.diag(sig_sorted)
    w11, w12 = W[:k, :k], W[:k, k:]
    w21, w22 = W[k:, :k], W[k:, k:]
    w12_hat = tsvd.u_t.T @ w12
    w21_hat = w21 @ tsvd.v_t
    rotated = np.empty((N, N))
    rotated[:k, :k] = tsvd.u_t.T @ (np.diag(sig_sorted[:k]) + w11) @ tsvd.v_t
    rotated[:k, k:] = w12_hat
    rotated[k:, :k] = w21_hat
    rotated[k:, k:] = np.diag(sig_sorted[k:]) + w22
    return GapBlocks(k, w11, w12, w21, w22, w12_hat, w21_hat, sig_sorted[k:].copy(), rotated)


def _subspace_bound(sigma_k, near, far, trailing_norm):
    denom = sigma_k ** 2 - trailing_norm ** 2
    if not denom > 0:
        return BoundValue.invalid("sigma_k**2 <= ||Sigma0_hat + W22||**2")
    return BoundValue((sigma_k * near + far * trailing_norm) / denom)


def signal_subspace_bound(gap, sigma_k, effective_k=None):
    """Bound on ``||U_k^T U0_hat||``."""
    w12h, w21h, trail = gap.partition(effective_k)
    return _subspace_bound(sigma_k, spectral_norm(w21h), spectral_norm(w12h), spectral_norm(trail))


def noise_subspace_bound(gap, sigma_k, effective_k=None):
    """Bound on ``||V_k^T V0_hat||``."""
    w12h, w21h, trail = gap.partition(effective_k)
    return _subspace_bound(sigma_k, spectral_norm(w12h), spectral_norm(w21h), spectral_norm(trail))


def pinv_bound(sigma1, sigma_hat_k, noise_dist, w21_hat_norm):
    """Relative pseudoinverse error bound ``(phi / s_hat_k)(s_1 dist + ||W21_hat||)``."""
    if sigma_hat_k == 0:
        raise ZeroDivisionError("approximate singular value sigma_hat_k is zero")
    if sigma_hat_k < 0:
        return BoundValue.invalid("sigma_hat_k < 0")
    return BoundValue(PHI / sigma_hat_k * (sigma1 * noise_dist + w21_hat_norm))


def solution_bound(sigma1, sigma_k, sigma_hat_k, noise_dist, w21_hat_norm, r_norm, d_norm):
    """Relative TSVD solution error bound."""
    if not (sigma_k > 0 and sigma_hat_k > 0):
        return BoundValue.invalid("sigma_k and sigma_hat_k must be positive")
    if not r_norm < d_norm:
        return BoundValue.invalid("||r|| >= ||d||")
    factor = math.sqrt(1.0 - (r_norm / d_norm) ** 2)
    value = PHI * sigma1 / (sigma_k * sigma_hat_k * factor) * (sigma1 * noise_dist + w21_hat_norm)
    return BoundValue(value)


def approx_bases(tsvd, effective_k=None):
    """Dense ``U_hat_k`` and ``V_hat_k`` obtained by expanding unit vectors."""
    check_cap(tsvd.N, "basis")
    e = tsvd.k if effective_k is None else int(effective_k)
    eye = np.eye(tsvd.k)[:, :e]
    return tsvd.expand(eye, "left"), tsvd.expand(eye, "right")


def true_subspace_distance(oracle, tsvd, which="signal", effective_k=None):
    """``||U_k^T U0_hat||`` (signal) or ``||V_k^T V0_hat||`` (noise)."""
    e = tsvd.k if effective_k is None else int(effective_k)
    u_hat, v_hat = approx_bases(tsvd, e)
    if which == "signal":
        exact, approx = oracle.u[:, :e], u_hat
    elif which == "noise":
        exact, approx = oracle.v[:, :e], v_hat
    else:
        raise ValueError(f"which must be 'signal' or 'noise', got {which!r}")
    # ||X^T Q0|| = ||X^T (I - Q Q^T)|| since Q0 spans the complement of Q
    cross = exact.T - (exact.T @ approx) @ approx.T
    return spectral_norm(cross)


@dataclass(frozen=True)
class BoundReport:
    k: int
    signal_bound: BoundValue
    noise_bound: BoundValue
    pinv_bound: BoundValue
    solution_bound: BoundValue
    true_signal_dist: float
    true_noise_dist: float
    true_pinv_err: float
    true_solution_err: float
    sigma1: float
    sigma_k: float
    sigma_hat_k: float
    phi: float = PHI

    CSV_HEADER = (
        "k", "true_signal", "signal_bound", "true_noise", "noise_bound",
        "true_pinv", "pinv_bound", "true_sol", "sol_bound",
        "signal_valid", "noise_valid", "pinv_valid", "sol_valid",
    )

    def csv_row(self):
        b = (self.signal_bound, self.noise_bound, self.pinv_bound, self.solution_bound)
        return (
            self.k,
            self.true_signal_dist, b[0].value,
            self.true_noise_dist, b[1].value,
            self.true_pinv_err, b[2].value,
            self.true_solution_err, b[3].value,
        ) + tuple(x.valid for x in b)


def evaluate_bounds(k_dense, tsvd, d, effective_k=None, oracle=None, gap=None):
    """Compute all four bounds and the true quantities they bound."""
    K = np.asarray(k_dense, dtype=np.float64)
    oracle = dense_svd(K) if oracle is None else oracle
    gap = gap_blocks(K, tsvd) if gap is None else gap
    e = tsvd.k if effective_k is None else int(effective_k)
    d = np.asarray(d, dtype=np.float64)

    s = oracle.s
    sigma1, sigma_k = float(s[0]), float(s[e - 1])
    sigma_hat_k = float(tsvd.s_t[e - 1])
    w12h, w21h, trail = gap.partition(e)
    w21_norm = spectral_norm(w21h)

    sig_dist = true_subspace_distance(oracle, tsvd, "signal", e)
    noi_dist = true_subspace_distance(oracle, tsvd, "noise", e)

    u_hat, v_hat = approx_bases(tsvd, e)
    exact_pinv = (oracle.v[:, :e] / s[:e]) @ oracle.u[:, :e].T
    approx_pinv = (v_hat / tsvd.s_t[:e]) @ u_hat.T
    true_pinv = spectral_norm(exact_pinv - approx_pinv) * sigma_k

    x_exact = dense_tsvd_solution(oracle, d, e)
    x_approx = tsvd.pinv_apply(d, e)
    x_norm = np.linalg.norm(x_exact)
    true_sol = float(np.linalg.norm(x_exact - x_approx) / x_norm) if x_norm > 0 else 0.0
    r_norm = float(np.linalg.norm(d - K @ x_exact))
    d_norm = float(np.linalg.norm(d))

    return BoundReport(
        k=e,
        signal_bound=signal_subspace_bound(gap, sigma_k, e),
        noise_bound=noise_subspace_bound(gap, sigma_k, e),
        pinv_bound=pinv_bound(sigma1, sigma_hat_k, noi_dist, w21_norm),
        solution_bound=solution_bound(
            sigma1, sigma_k, sigma_hat_k, noi_dist, w21_norm, r_norm, d_norm
        ),
        true_signal_dist=sig_dist,
        true_noise_dist=noi_dist,
        true_pinv_err=true_pinv,
        true_solution_err=true_sol,
        sigma1=sigma1,
        sigma_k=sigma_k,
        sigma_hat_k=sigma_hat_k,
    )


def bound_sweep(k_dense, tsvd, d, effective_ks=None):
    """Reports for each effective rank, reusing one oracle SVD and one block set."""
    K = np.asarray(k_dense, dtype=np.float64)
    oracle = dense_svd(K)
    gap = gap_blocks(K, tsvd)
    ks = range(1, tsvd.k + 1) if effective_ks is None else effective_ks
    return [evaluate_bounds(K, tsvd, d, e, oracle, gap) for e in ks]
