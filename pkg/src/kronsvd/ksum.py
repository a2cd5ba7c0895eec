"""Decomposition of operators into sums of Kronecker products.

Two routes are provided:

* :func:`vlp_decompose` works on any dense ``n**2 x n**2`` matrix by taking
  the SVD of its block rearrangement (cost ``O(n**6)``, desk scale only).
* :func:`psf_kron_sum` builds the decomposition of a zero-boundary blur
  operator straight from the point-spread function in ``O(n**3)``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._linalg import frozen, svd_signed
from .exceptions import DimensionError, check_cap
from .kron_core import KronPair, as_matrix, unvec

__all__ = [
    "KroneckerSum",
    "Psf",
    "DEFAULT_RANK_TOL",
    "rearrange",
    "vlp_decompose",
    "psf_kron_sum",
    "kron_rank_truncate",
    "toeplitz_from_vector",
    "laplacian_2d",
]

DEFAULT_RANK_TOL = 1e-12


@dataclass(frozen=True)
class KroneckerSum:
    """Ordered terms of ``K = sum_i A_i kron B_i``.

    ``weights`` are the per-term scalars used for rank selection (singular
    values of the rearrangement, or of the PSF for blur operators) and must be
    non-increasing. ``kron_rank_full`` is the numerical Kronecker rank of the
    operator the terms came from, when it is known.
    """

    terms: tuple
    weights: np.ndarray
    kron_rank_full: int = None
    n: int = field(init=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("KroneckerSum needs at least one term")
        for t in terms:
            if not isinstance(t, KronPair):
                raise TypeError(f"terms must be KronPair instances, got {type(t).__name__}")
        n = terms[0].n
        if any(t.n != n for t in terms):
            raise DimensionError("all Kronecker terms must share the factor dimension")
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size != len(terms):
            raise DimensionError(f"{len(terms)} terms but {w.size} weights")
        if np.any(w < 0) or np.any(np.diff(w) > 0):
            raise ValueError("weights must be nonnegative and non-increasing")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "weights", frozen(w))
        object.__setattr__(self, "n", n)

    @property
    def r(self):
        return len(self.terms)

    @property
    def N(self):
        return self.n * self.n

    def truncate(self, r):
        """Keep the leading ``r`` terms."""
        if not 1 <= r <= self.r:
            raise ValueError(f"r must be in [1, {self.r}], got {r}")
        return KroneckerSum(self.terms[:r], self.weights[:r], self.kron_rank_full)


@dataclass(frozen=True)
class Psf:
    """Point-spread function on an ``n x n`` grid with the point source at ``center``."""

    array: np.ndarray
    center: tuple = None

    def __post_init__(self):
        arr = as_matrix(self.array, "PSF")
        if arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"PSF must be square, got shape {arr.shape}")
        if np.any(arr < 0):
            raise ValueError("PSF entries must be nonnegative")
        if not np.any(arr != 0):
            raise ValueError("PSF is identically zero")
        center = self.center
        if center is None:
            # row-major argmax breaks ties toward the smallest (row, col)
            center = np.unravel_index(int(np.argmax(arr)), arr.shape)
        center = (int(center[0]), int(center[1]))
        if not (0 <= center[0] < arr.shape[0] and 0 <= center[1] < arr.shape[1]):
            raise ValueError(f"PSF center {center} outside a {arr.shape} array")
        object.__setattr__(self, "array", arr)
        object.__setattr__(self, "center", center)

    @property
    def n(self):
        return self.array.shape[0]


def rearrange(k_dense, n):
    """Block-to-row rearrangement of an ``n**2 x n**2`` matrix.

    Block ``(i, j)`` (each ``n x n``) becomes row ``j*n + i`` holding the
    column-major vec of that block. With this indexing,
    ``rearrange(kron(A, B)) == outer(vec(A), vec(B))``.
    """
    K = np.asarray(k_dense, dtype=np.float64)
    N = n * n
    if K.shape != (N, N):
        raise DimensionError(f"expected a {N}x{N} matrix for n={n}, got shape {K.shape}")
    # K4[i, bi, j, bj] = K[i*n + bi, j*n + bj]
    K4 = K.reshape(n, n, n, n)
    return K4.transpose(2, 0, 3, 1).reshape(N, N).copy()


def kron_rank_truncate(weights, tol=DEFAULT_RANK_TOL):
    """Number of leading weights kept before the first relative gap below ``tol``.

    Returns the smallest ``r`` with ``weights[r] / weights[0] < tol`` (0-based
    ``weights[r]``), or ``len(weights)`` when no weight falls below.
    """
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size == 0:
        raise ValueError("weights is empty")
    if w[0] <= 0:
        raise ValueError("first weight must be positive")
    if np.any(w < 0) or np.any(np.diff(w) > 0):
        raise ValueError("weights must be nonnegative and non-increasing")
    below = np.nonzero(w / w[0] < tol)[0]
    return int(below[0]) if below.size else int(w.size)


def vlp_decompose(k_dense, n, r):
    """Van Loan--Pitsianis decomposition of a dense matrix into ``r`` Kronecker terms."""
    N = n * n
    check_cap(N, "operator")
    if r < 1 or r > N:
        raise ValueError(f"r must be in [1, {N}], got {r}")
    tilde = rearrange(k_dense, n)
    u, s, v = svd_signed(tilde)
    R = kron_rank_truncate(s) if s[0] > 0 else 0
    terms = []
    for i in range(r):
        scale = np.sqrt(s[i])
        terms.append(KronPair(unvec(scale * u[:, i], n), unvec(scale * v[:, i], n)))
    return KroneckerSum(tuple(terms), s[:r], R)


def toeplitz_from_vector(w, c):
    """Banded Toeplitz ``T`` with ``T[i, a] = w[i - a + c]`` and zeros off the band.

    This is the 1-D zero-boundary blur matrix for a kernel ``w`` whose point
    source sits at index ``c``.
    """
    w = np.asarray(w, dtype=np.float64).ravel()
    n = w.size
    i = np.arange(n)[:, None]
    a = np.arange(n)[None, :]
    idx = i - a + c
    valid = (idx >= 0) & (idx < n)
    return np.where(valid, w[np.clip(idx, 0, n - 1)], 0.0)


def psf_kron_sum(psf, r=None, tol=DEFAULT_RANK_TOL):
    """Kronecker sum of the zero-boundary blur operator defined by ``psf``.

    With ``P = sum_i s_i u_i v_i^T`` the SVD of the PSF array, term ``i`` is
    ``A_i kron B_i`` with ``A_i`` the Toeplitz matrix of ``sqrt(s_i) v_i``
    (anchored at the center column) and ``B_i`` that of ``sqrt(s_i) u_i``
    (anchored at the center row). Keeping all numerically nonzero terms
    reproduces the blur operator exactly.

    Parameters
    ----------
    psf : Psf or array_like
    r : int, optional
        Number of terms; defaults to the numerical rank of the PSF array.
    tol : float
        Relative threshold defining the numerical rank.
    """
    if not isinstance(psf, Psf):
        psf = Psf(psf)
    u, s, v = svd_signed(psf.array)
    R = kron_rank_truncate(s, tol)
    if r is None:
        r = R
    if not 1 <= r <= R:
        raise ValueError(f"r must be in [1, {R}] (numerical rank of the PSF), got {r}")
    cr, cc = psf.center
    terms = []
    for i in range(r):
        scale = np.sqrt(s[i])
        a = toeplitz_from_vector(scale * v[:, i], cc)
        b = toeplitz_from_vector(scale * u[:, i], cr)
        terms.append(KronPair(a, b))
    return KroneckerSum(tuple(terms), s[:r], R)


def laplacian_2d(n):
    """Dense 2-D discrete Laplacian on an ``n x n`` grid (block tridiagonal)."""
    T = 4.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    N = n * n
    check_cap(N, "Laplacian")
    L = np.zeros((N, N))
    for i in range(n):
        L[i * n:(i + 1) * n, i * n:(i + 1) * n] = T
        if i + 1 < n:
            L[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = -np.eye(n)
            L[(i + 1) * n:(i + 2) * n, i * n:(i + 1) * n] = -np.eye(n)
    return L
