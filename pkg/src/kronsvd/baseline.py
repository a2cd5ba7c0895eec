"""Fixed-vector baseline: first-term singular vectors with the best diagonal.

The singular vectors are those of ``A_1 kron B_1``; the diagonal is
``diag(U_1^T K V_1)``, which is the Frobenius-optimal diagonal for those
vectors. Entries may be negative and are kept signed.
"""

from dataclasses import dataclass

import numpy as np

from ._linalg import frozen
from .exceptions import DimensionError
from .tsvd import FactorSvd, factor_svds

__all__ = ["BaselineTsvd", "baseline_build", "baseline_pinv_apply"]


@dataclass(frozen=True)
class BaselineTsvd:
    """Baseline factorization ``K ~= U_1 diag(sigma_hat) V_1^T``.

    ``sigma_hat`` is stored in Kronecker order; ``perm_by_magnitude`` lists
    Kronecker indices by non-increasing ``|sigma_hat|``.
    """

    fsvd: FactorSvd
    sigma_hat: np.ndarray
    perm_by_magnitude: np.ndarray

    def __post_init__(self):
        N = self.fsvd.n ** 2
        if self.sigma_hat.shape != (N,) or self.perm_by_magnitude.shape != (N,):
            raise DimensionError(f"sigma_hat and perm_by_magnitude must have length {N}")
        if not np.array_equal(np.sort(self.perm_by_magnitude), np.arange(N)):
            raise ValueError("perm_by_magnitude is not a permutation")

    @property
    def n(self):
        return self.fsvd.n

    @property
    def N(self):
        return self.fsvd.n ** 2

    @property
    def k(self):
        return self.N

    @property
    def sigma(self):
        """Signed diagonal values ordered by decreasing magnitude."""
        return self.sigma_hat[self.perm_by_magnitude]

    def project(self, d, side="right"):
        d = np.asarray(d, dtype=np.float64)
        if d.shape[0] != self.N:
            raise DimensionError(f"expected leading dimension {self.N}, got shape {d.shape}")
        if side == "right":
            y = self.fsvd.apply_v(d, transpose=True)
        elif side == "left":
            y = self.fsvd.apply_u(d, transpose=True)
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return y[self.perm_by_magnitude]

    def expand(self, y, side="right"):
        y = np.asarray(y, dtype=np.float64)
        if y.shape[0] != self.N:
            raise DimensionError(f"expected leading dimension {self.N}, got shape {y.shape}")
        full = np.empty_like(y)
        full[self.perm_by_magnitude] = y
        if side == "right":
            return self.fsvd.apply_v(full)
        if side == "left":
            return self.fsvd.apply_u(full)
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def baseline_build(ksum, fsvd=None):
    """Compute ``diag(U_1^T K V_1)`` term by term.

    The diagonal of a Kronecker product is the Kronecker product of the
    diagonals, so each term costs two ``n x n`` triple products.
    """
    if fsvd is None:
        fsvd = factor_svds(ksum.terms[0])
    if ksum.n != fsvd.n:
        raise DimensionError(f"Kronecker sum has n={ksum.n}, factor SVDs have n={fsvd.n}")
    sigma = np.zeros(ksum.N)
    for term in ksum.terms:
        g_a = np.einsum("ji,jk,ki->i", fsvd.u_a, term.a, fsvd.v_a)
        g_b = np.einsum("ji,jk,ki->i", fsvd.u_b, term.b, fsvd.v_b)
        sigma += np.kron(g_a, g_b)
    order = np.argsort(-np.abs(sigma), kind="stable")
    return BaselineTsvd(fsvd, frozen(sigma), frozen(order))


def baseline_pinv_apply(b, d, k, alpha=0.0):
    """Filtered inverse using the ``k`` largest-magnitude diagonal entries.

    Applies ``V_1 diag(f) U_1^T d`` with ``f = sigma / (sigma**2 + alpha**2)``
    on the selected entries and zero elsewhere.
    """
    if not 1 <= k <= b.N:
        raise ValueError(f"k must be in [1, {b.N}], got {k}")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    sig = b.sigma[:k]
    if alpha == 0 and np.any(sig == 0):
        idx = int(np.nonzero(sig == 0)[0][0])
        raise ZeroDivisionError(f"baseline value {idx + 1} is zero and alpha is 0")
    y = b.project(d, "left")
    y[k:] = 0.0
    y[:k] *= sig / (sig ** 2 + alpha ** 2)
    return b.expand(y, "right")
