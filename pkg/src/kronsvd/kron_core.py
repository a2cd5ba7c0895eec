"""Kronecker product primitives.

All vectorization is column-major, so that for square ``A``, ``B`` and
``d = vec(D)``::

    (A kron B) d == vec(B @ D @ A.T)

Nothing in this module forms an ``n**2 x n**2`` matrix except
:func:`kron_dense`, which is guarded by the materialization cap.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, check_cap

__all__ = [
    "KronPair",
    "as_matrix",
    "vec",
    "unvec",
    "kron_apply",
    "kron_sum_apply",
    "kron_dense",
    "kron_sum_dense",
]


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite, read-only float64 2-D array."""
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class KronPair:
    """A single Kronecker term ``a kron b`` with square factors of equal size."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_matrix(self.b, "b")
        if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
            raise DimensionError(
                f"Kronecker factors must be square, got {a.shape} and {b.shape}"
            )
        if a.shape != b.shape:
            raise DimensionError(
                f"Kronecker factors must share a dimension, got {a.shape} and {b.shape}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self):
        return self.a.shape[0]


def vec(d_mat):
    """Stack the columns of a square matrix into a vector."""
    d_mat = np.asarray(d_mat, dtype=np.float64)
    if d_mat.ndim != 2 or d_mat.shape[0] != d_mat.shape[1]:
        raise DimensionError(f"vec expects a square matrix, got shape {d_mat.shape}")
    return d_mat.ravel(order="F").copy()


def unvec(d, n):
    """Inverse of :func:`vec`: reshape a length ``n**2`` vector to ``n x n``."""
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 1 or d.size != n * n:
        raise DimensionError(f"unvec expects a vector of length {n * n}, got shape {d.shape}")
    return d.reshape((n, n), order="F").copy()


def _check_vector(d, n):
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 1 or d.size != n * n:
        raise DimensionError(f"expected a vector of length {n * n}, got shape {d.shape}")
    return d


def kron_apply(pair, d, transpose=False):
    """Compute ``(A kron B) d`` (or the transpose) without forming ``A kron B``.

    Parameters
    ----------
    pair : KronPair
    d : ndarray, shape (n**2,)
    transpose : bool
        If true, apply ``A.T kron B.T`` instead.
    """
    n = pair.n
    d = _check_vector(d, n)
    D = d.reshape((n, n), order="F")
    if transpose:
        out = pair.b.T @ D @ pair.a
    else:
        out = pair.b @ D @ pair.a.T
    return out.ravel(order="F")


def _terms(ksum):
    terms = getattr(ksum, "terms", ksum)
    terms = list(terms)
    if not terms:
        raise ValueError("Kronecker sum has no terms")
    n = terms[0].n
    for t in terms:
        if t.n != n:
            raise DimensionError(f"Kronecker terms disagree in dimension: {t.n} vs {n}")
    return terms


def kron_sum_apply(ksum, d, transpose=False):
    """Apply ``sum_i A_i kron B_i`` to ``d``, summing terms in order.

    ``ksum`` may be a :class:`~kronsvd.ksum.KroneckerSum` or any sequence of
    :class:`KronPair`.
    """
    terms = _terms(ksum)
    out = kron_apply(terms[0], d, transpose)
    for t in terms[1:]:
        out = out + kron_apply(t, d, transpose)
    return out


def kron_dense(pair):
    """Materialize ``A kron B``; refused when ``n**2`` exceeds the cap."""
    check_cap(pair.n * pair.n, "Kronecker product")
    return np.kron(pair.a, pair.b)


def kron_sum_dense(ksum):
    terms = _terms(ksum)
    out = kron_dense(terms[0])
    for t in terms[1:]:
        out = out + kron_dense(t)
    return out
