"""Reordered approximate truncated SVD built from a Kronecker sum.

Starting from ``K = sum_i A_i kron B_i``, the SVD of the first term
``A_1 kron B_1 = U_1 S_1 V_1^T`` is available from the SVDs of the two
``n x n`` factors. Writing ``K = U_1 (S_1 + W) V_1^T`` and permuting so that the
Kronecker diagonal ``S_1`` is sorted, the leading ``k x k`` block

    T = S_1[:k] + W_11

is assembled without ever forming ``W`` and decomposed densely. The result

    K_k ~= (U_1 P)[:, :k] U_t  diag(s_t)  ((V_1 P)[:, :k] V_t)^T

is kept in factored form: two pairs of ``n x n`` factors, a permutation
index map and three ``k x k``-sized arrays, i.e. ``O(n**2 + k**2)`` storage.
"""

from dataclasses import dataclass

import numpy as np

from ._linalg import frozen, svd_signed
from .exceptions import DimensionError
from .kron_core import KronPair

__all__ = [
    "FactorSvd",
    "SawbladePermutation",
    "CoreMatrix",
    "ImplicitTsvd",
    "factor_svds",
    "sawblade_perm",
    "assemble_w11",
    "build",
    "project",
    "expand",
    "tsvd_apply",
    "tsvd_pinv_apply",
    "kron_factor_apply",
]


def kron_factor_apply(a, b, x):
    """``(a kron b) @ x`` for a vector or for each column of a 2-D ``x``."""
    n = a.shape[0]
    if x.ndim == 1:
        D = x.reshape((n, n), order="F")
        return (b @ D @ a.T).ravel(order="F")
    m = x.shape[1]
    D = x.reshape((n, n, m), order="F")
    out = np.einsum("ij,jkc,lk->ilc", b, D, a, optimize=True)
    return out.reshape((n * n, m), order="F")


@dataclass(frozen=True)
class FactorSvd:
    """SVDs ``A_1 = u_a diag(s_a) v_a^T`` and ``B_1 = u_b diag(s_b) v_b^T``."""

    u_a: np.ndarray
    s_a: np.ndarray
    v_a: np.ndarray
    u_b: np.ndarray
    s_b: np.ndarray
    v_b: np.ndarray

    @property
    def n(self):
        return self.s_a.size

    def kron_diagonal(self):
        """Diagonal of ``S_A kron S_B`` in Kronecker order (index ``i*n + j``)."""
        return np.kron(self.s_a, self.s_b)

    def apply_u(self, x, transpose=False):
        if transpose:
            return kron_factor_apply(self.u_a.T, self.u_b.T, x)
        return kron_factor_apply(self.u_a, self.u_b, x)

    def apply_v(self, x, transpose=False):
        if transpose:
            return kron_factor_apply(self.v_a.T, self.v_b.T, x)
        return kron_factor_apply(self.v_a, self.v_b, x)


@dataclass(frozen=True)
class SawbladePermutation:
    """Index map sorting the Kronecker diagonal into non-increasing order.

    Position ``p`` of the sorted sequence holds Kronecker index ``map[p]``;
    ``inverse_map[map[p]] == p``.
    """

    map: np.ndarray
    inverse_map: np.ndarray

    def __post_init__(self):
        fwd = np.asarray(self.map, dtype=np.int64)
        inv = np.asarray(self.inverse_map, dtype=np.int64)
        if fwd.shape != inv.shape or fwd.ndim != 1:
            raise DimensionError("map and inverse_map must be 1-D of equal length")
        if not np.array_equal(np.sort(fwd), np.arange(fwd.size)):
            raise ValueError("map is not a permutation")
        if not np.array_equal(inv[fwd], np.arange(fwd.size)):
            raise ValueError("inverse_map does not invert map")
        object.__setattr__(self, "map", frozen(fwd))
        object.__setattr__(self, "inverse_map", frozen(inv))

    @property
    def size(self):
        return self.map.size


@dataclass(frozen=True)
class CoreMatrix:
    """``t = diag(sigma_1k) + w11``; both parts are kept for diagnostics."""

    t: np.ndarray
    sigma_1k: np.ndarray

    @property
    def w11(self):
        return self.t - np.diag(self.sigma_1k)


def factor_svds(pair):
    """SVDs of the two factors of the leading Kronecker term."""
    if not isinstance(pair, KronPair):
        pair = KronPair(*pair)
    u_a, s_a, v_a = svd_signed(pair.a)
    u_b, s_b, v_b = svd_signed(pair.b)
    return FactorSvd(*(frozen(x) for x in (u_a, s_a, v_a, u_b, s_b, v_b)))


def sawblade_perm(s_a, s_b):
    """Permutation sorting ``kron(s_a, s_b)`` non-increasingly, ties by index."""
    s_a = np.asarray(s_a, dtype=np.float64).ravel()
    s_b = np.asarray(s_b, dtype=np.float64).ravel()
    prods = np.kron(s_a, s_b)
    fwd = np.argsort(-prods, kind="stable")
    inv = np.empty_like(fwd)
    inv[fwd] = np.arange(fwd.size)
    return SawbladePermutation(fwd, inv)


def assemble_w11(ksum, fsvd, perm, k):
    """Leading ``k x k`` block of the permuted core ``P^T (S_1 + W) P``.

    ``W = sum_{i>=2} (U_A^T A_i V_A) kron (U_B^T B_i V_B)``; each term costs
    two ``n x n`` products plus an ``O(k**2)`` gather.
    """
    n = fsvd.n
    N = n * n
    if not 1 <= k <= N:
        raise ValueError(f"k must be in [1, {N}], got {k}")
    if ksum.n != n:
        raise DimensionError(f"Kronecker sum has n={ksum.n}, factor SVDs have n={n}")
    lead = perm.map[:k]
    ia = lead // n
    ib = lead % n
    sigma_1k = fsvd.kron_diagonal()[lead]
    t = np.diag(sigma_1k)
    for term in ksum.terms[1:]:
        g_a = fsvd.u_a.T @ term.a @ fsvd.v_a
        g_b = fsvd.u_b.T @ term.b @ fsvd.v_b
        t += g_a[np.ix_(ia, ia)] * g_b[np.ix_(ib, ib)]
    return CoreMatrix(frozen(t), frozen(sigma_1k))


@dataclass(frozen=True)
class ImplicitTsvd:
    """Factored approximate TSVD ``U_k diag(s_t) V_k^T`` of an ``N x N`` operator.

    ``U_k = (U_1 P)[:, :k] @ u_t`` and ``V_k = (V_1 P)[:, :k] @ v_t`` are never
    formed; :meth:`project` and :meth:`expand` apply them and their
    transposes.
    """

    fsvd: FactorSvd
    perm: SawbladePermutation
    k: int
    u_t: np.ndarray
    s_t: np.ndarray
    v_t: np.ndarray

    def __post_init__(self):
        k = int(self.k)
        if self.perm.size != self.N:
            raise DimensionError("permutation length does not match n**2")
        if not 1 <= k <= self.N:
            raise ValueError(f"k must be in [1, {self.N}], got {k}")
        for name in ("u_t", "v_t"):
            if getattr(self, name).shape != (k, k):
                raise DimensionError(f"{name} must be {k}x{k}")
        if self.s_t.shape != (k,):
            raise DimensionError(f"s_t must have length {k}")
        object.__setattr__(self, "k", k)

    @property
    def n(self):
        return self.fsvd.n

    @property
    def N(self):
        return self.fsvd.n ** 2

    @property
    def sigma(self):
        return self.s_t

    def trailing_first_term(self):
        """First-term singular values beyond the truncation, in sorted order."""
        return self.fsvd.kron_diagonal()[self.perm.map[self.k:]]

    def _check(self, x, length):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim not in (1, 2) or x.shape[0] != length:
            raise DimensionError(f"expected leading dimension {length}, got shape {x.shape}")
        return x

    def project(self, d, side="right"):
        """``V_k^T d`` (``side='right'``) or ``U_k^T d`` (``side='left'``)."""
        d = self._check(d, self.N)
        if side == "right":
            y = self.fsvd.apply_v(d, transpose=True)
            small = self.v_t
        elif side == "left":
            y = self.fsvd.apply_u(d, transpose=True)
            small = self.u_t
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        y = y[self.perm.map[: self.k]]
        return small.T @ y

    def expand(self, y, side="right"):
        """``V_k y`` (``side='right'``) or ``U_k y`` (``side='left'``)."""
        y = self._check(y, self.k)
        if side == "right":
            z = self.v_t @ y
        elif side == "left":
            z = self.u_t @ y
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        full = np.zeros((self.N,) + z.shape[1:])
        full[self.perm.map[: self.k]] = z
        if side == "right":
            return self.fsvd.apply_v(full)
        return self.fsvd.apply_u(full)

    def apply(self, d):
        return self.expand(self.s_t * self.project(d, "right"), "left")

    def pinv_apply(self, d, effective_k=None):
        """Truncated pseudoinverse using the leading ``effective_k`` triples."""
        e = self.k if effective_k is None else int(effective_k)
        if not 1 <= e <= self.k:
            raise ValueError(f"effective_k must be in [1, {self.k}], got {e}")
        zero = np.nonzero(self.s_t[:e] == 0)[0]
        if zero.size:
            raise ZeroDivisionError(f"approximate singular value {zero[0] + 1} is zero")
        y = self.project(d, "left")
        y[e:] = 0.0
        y[:e] /= self.s_t[:e]
        return self.expand(y, "right")


def build(ksum, k):
    """Build the reordered approximate TSVD of ``ksum`` with truncation index ``k``."""
    fsvd = factor_svds(ksum.terms[0])
    perm = sawblade_perm(fsvd.s_a, fsvd.s_b)
    core = assemble_w11(ksum, fsvd, perm, k)
    u_t, s_t, v_t = svd_signed(core.t)
    return ImplicitTsvd(fsvd, perm, k, frozen(u_t), frozen(s_t), frozen(v_t))


def project(tsvd, d, side="right"):
    return tsvd.project(d, side)


def expand(tsvd, y, side="right"):
    return tsvd.expand(y, side)


def tsvd_apply(tsvd, d):
    return tsvd.apply(d)


def tsvd_pinv_apply(tsvd, d, effective_k=None):
    return tsvd.pinv_apply(d, effective_k)
