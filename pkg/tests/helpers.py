"""Dense reference constructions shared by the test modules."""

import numpy as np

from kronsvd.kron_core import KronPair
from kronsvd.ksum import KroneckerSum, psf_kron_sum
from kronsvd.problems import random_psf


def random_ksum(n, r, rng, decay=0.3):
    """``r`` random terms with geometrically decaying scale (dominant first term)."""
    terms = []
    for i in range(r):
        s = decay ** i
        terms.append(KronPair(s * rng.standard_normal((n, n)), rng.standard_normal((n, n))))
    return KroneckerSum(tuple(terms), [decay ** i for i in range(r)])


def random_psf_ksum(n, rng):
    return psf_kron_sum(random_psf(n, rng))


def dense_first_bases(tsvd):
    """``U_1 P`` and ``V_1 P`` as explicit matrices."""
    f = tsvd.fsvd
    P = np.eye(tsvd.N)[:, tsvd.perm.map]
    return np.kron(f.u_a, f.u_b) @ P, np.kron(f.v_a, f.v_b) @ P


def dense_factors(tsvd):
    """Explicit ``U_k`` and ``V_k``."""
    ubar, vbar = dense_first_bases(tsvd)
    return ubar[:, :tsvd.k] @ tsvd.u_t, vbar[:, :tsvd.k] @ tsvd.v_t
