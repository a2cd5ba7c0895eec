"""
Kronecker structure of blur operators
=====================================

A spatially invariant blur with zero boundary conditions is a sum of
Kronecker products. This script shows the vec convention, the rearrangement
that exposes the Kronecker rank, and the decomposition of a PSF.
"""

import numpy as np

from kronsvd import (
    KronPair,
    kron_apply,
    kron_dense,
    kron_sum_apply,
    laplacian_2d,
    psf_kron_sum,
    rearrange,
    vec,
)
from kronsvd.problems import atmospheric_psf, blur_apply, motion_psf, satellite_image

# (A kron B) vec(D) = vec(B D A^T) with column-major vec, so a Kronecker
# product is applied with two small matrix products
rng = np.random.default_rng(0)
A, B = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
D = rng.standard_normal((3, 3))
pair = KronPair(A, B)
print("implicit vs explicit:", np.abs(kron_apply(pair, vec(D)) - kron_dense(pair) @ vec(D)).max())

# The 2-D Laplacian I kron T + S kron (-I) has full rank 9 but Kronecker rank 2:
# its rearrangement has only two nonzero singular values
s = np.linalg.svd(rearrange(laplacian_2d(3), 3), compute_uv=False)
print("rearranged Laplacian singular values:", np.round(s[:4], 12))

# For a PSF the Kronecker terms come from the SVD of the PSF array itself
for name, psf in (("atmospheric", atmospheric_psf(32)), ("motion", motion_psf(32))):
    ks = psf_kron_sum(psf)
    w = ks.weights / ks.weights[0]
    print(f"{name:12s} r={ks.r:2d}  w2/w1={w[1]:.2e}  w8/w1={w[min(7, ks.r - 1)]:.2e}")

# The terms reproduce the blur exactly
psf = atmospheric_psf(32)
x = satellite_image(32)
ks = psf_kron_sum(psf)
direct = blur_apply(psf, x).ravel(order="F")
print("blur vs Kronecker sum:", np.linalg.norm(kron_sum_apply(ks, vec(x)) - direct) / np.linalg.norm(direct))
