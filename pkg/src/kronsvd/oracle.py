"""Dense reference computations for desk-scale problems.

Everything here materializes ``N x N`` matrices and is refused above the
materialization cap (``KRONSVD_CAP``, default ``N <= 4096``).
"""

from dataclasses import dataclass

import numpy as np

from ._linalg import frozen, svd_signed
from .exceptions import DimensionError, check_cap

__all__ = ["DenseSvdTriple", "dense_svd", "dense_tsvd_solution"]


@dataclass(frozen=True)
class DenseSvdTriple:
    """Full SVD ``K = u @ diag(s) @ v.T`` with ``s`` non-increasing."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def N(self):
        return self.u.shape[0]

    # spectral-operator interface shared with the implicit factorizations

    @property
    def sigma(self):
        return self.s

    @property
    def k(self):
        return self.s.size

    def project(self, d, side="right"):
        d = _vector(d, self.N)
        basis = self.v if side == "right" else self.u
        return basis.T @ d

    def expand(self, y, side="right"):
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.s.size,):
            raise DimensionError(f"expected a vector of length {self.s.size}, got {y.shape}")
        basis = self.v if side == "right" else self.u
        return basis @ y

    def matrix(self, k=None):
        k = self.s.size if k is None else k
        return (self.u[:, :k] * self.s[:k]) @ self.v[:, :k].T


def _vector(d, N):
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (N,):
        raise DimensionError(f"expected a vector of length {N}, got shape {d.shape}")
    return d


def dense_svd(k_dense):
    """Full SVD of a dense square matrix with deterministic singular vector signs."""
    K = np.asarray(k_dense, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {K.shape}")
    check_cap(K.shape[0], "operator")
    u, s, v = svd_signed(K)
    return DenseSvdTriple(frozen(u), frozen(s), frozen(v))


def dense_tsvd_solution(triple, d, k):
    """``V_k diag(1/s_k) U_k^T d`` from the exact SVD."""
    if not 1 <= k <= triple.s.size:
        raise ValueError(f"k must be in [1, {triple.s.size}], got {k}")
    if triple.s[k - 1] == 0:
        raise ZeroDivisionError(f"singular value {k} is zero")
    d = _vector(d, triple.N)
    y = triple.u[:, :k].T @ d
    return triple.v[:, :k] @ (y / triple.s[:k])
