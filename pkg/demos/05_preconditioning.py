"""
Preconditioning CGLS with the approximate TSVD
==============================================

The approximate singular triples give M^{-1} = V diag(g) V^T + (I - V V^T)
with g = 1/sqrt(sigma**2 + alpha**2). A better spectrum means fewer
iterations for the damped least-squares problem.
"""

from kronsvd import baseline_build, build, make_problem, make_preconditioner, pcgls, psf_kron_sum
from kronsvd.krylov import ksum_operator
from kronsvd.problems import atmospheric_psf, satellite_image

n, k, alpha = 32, 600, 1e-3
psf = atmospheric_psf(n)
ks = psf_kron_sum(psf)
prob = make_problem(psf, satellite_image(n), noise_level=0.02, seed=1)
op = ksum_operator(ks)

for name, m in (
    ("none", None),
    ("baseline", make_preconditioner(baseline_build(ks), alpha, k=k)),
    ("reordered", make_preconditioner(build(ks, k), alpha)),
):
    rep = pcgls(op, prob.d, alpha, m, tol=1e-6, maxit=3000)
    print(f"{name:9s} {rep.iterations:5d} iterations  converged={rep.converged}")
