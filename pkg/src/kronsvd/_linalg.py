"""Small dense helpers used by several modules."""

import numpy as np


def fix_signs(u, v):
    """Flip singular pairs so the largest-magnitude entry of each ``u`` column is positive.

    ``u`` and ``v`` are modified in place and returned. Ties in magnitude go to
    the first (lowest) row index.
    """
    if u.size == 0:
        return u, v
    rows = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[rows, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    u *= signs
    v[:, : signs.size] *= signs
    return u, v


def svd_signed(m, full_matrices=True):
    """SVD returning ``(u, s, v)`` (not ``v.T``) with deterministic signs."""
    u, s, vt = np.linalg.svd(np.asarray(m, dtype=np.float64), full_matrices=full_matrices)
    v = vt.T.copy()
    u = u.copy()
    k = min(u.shape[1], v.shape[1])
    fix_signs(u[:, :k], v[:, :k])
    return u, s, v


def spectral_norm(m):
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a
