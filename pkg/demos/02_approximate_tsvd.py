"""
Approximate truncated SVD from the first Kronecker term
=======================================================

The SVD of A_1 kron B_1 is cheap. Sorting its diagonal and correcting the
leading k x k block with the remaining terms gives a much better spectrum
than keeping the first-term singular vectors with the best diagonal.
"""

import numpy as np

from kronsvd import baseline_build, build, dense_svd, kron_sum_dense, psf_kron_sum
from kronsvd.experiments import sv_relative_errors
from kronsvd.problems import motion_psf, speckle_psf
from kronsvd.serialize import largest_serialized_field, serialized_entry_count

n, k = 16, 64
for name, psf in (("motion", motion_psf(n)), ("speckle", speckle_psf(n))):
    ks = psf_kron_sum(psf)
    exact = dense_svd(kron_sum_dense(ks)).s
    err_r = sv_relative_errors(build(ks, k).sigma, exact, k)
    err_b = sv_relative_errors(baseline_build(ks).sigma, exact, k)
    print(f"{name}: median relative error over the top {k // 2}")
    print(f"  reordered {np.median(err_r[:k // 2]):.2e}   baseline {np.median(err_b[:k // 2]):.2e}")
    # accuracy degrades toward the truncation index, so one builds at k and
    # later truncates down
    print(f"  reordered near k: {np.median(err_r[-8:]):.2e}")

# The factorization is stored as two n x n factor SVDs, an index map and
# k x k blocks
t = build(psf_kron_sum(speckle_psf(32)), 300)
print("stored numbers:", serialized_entry_count(t), " largest field:", largest_serialized_field(t))
