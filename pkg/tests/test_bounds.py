import math

import numpy as np
import pytest

from helpers import dense_factors, dense_first_bases, random_ksum
from kronsvd.bounds import (
    PHI,
    BoundReport,
    BoundValue,
    approx_bases,
    bound_sweep,
    evaluate_bounds,
    gap_blocks,
    noise_subspace_bound,
    pinv_bound,
    signal_subspace_bound,
    solution_bound,
    true_subspace_distance,
)
from kronsvd.exceptions import CapacityError
from kronsvd.kron_core import KronPair, kron_sum_dense
from kronsvd.ksum import KroneckerSum, psf_kron_sum
from kronsvd.oracle import DenseSvdTriple, dense_svd
from kronsvd.problems import random_psf, speckle_psf
from kronsvd.tsvd import build


def _single(rng, n=3):
    return KroneckerSum((KronPair(rng.standard_normal((n, n)), rng.standard_normal((n, n))),), [1.0])


def _number(b):
    return b.value if b.valid else None


def test_phi_constant():
    assert PHI == pytest.approx(1.6180339887, abs=1e-9)
    assert PHI == (1 + math.sqrt(5)) / 2


def test_single_term_blocks_zero(rng):
    ks = _single(rng)
    t = build(ks, 4)
    g = gap_blocks(kron_sum_dense(ks), t)
    for blk in (g.w11, g.w12, g.w21, g.w22, g.w12_hat, g.w21_hat):
        assert np.abs(blk).max() <= 1e-12
    assert signal_subspace_bound(g, dense_svd(kron_sum_dense(ks)).s[3]).value == pytest.approx(0, abs=1e-12)


def test_blocks_match_brute_force(rng):
    ks = random_ksum(3, 2, rng)
    K = kron_sum_dense(ks)
    t = build(ks, 4)
    g = gap_blocks(K, t)
    ubar, vbar = dense_first_bases(t)
    first = kron_sum_dense(ks.truncate(1))
    W = ubar.T @ (K - first) @ vbar
    np.testing.assert_allclose(g.w11, W[:4, :4], atol=1e-11)
    np.testing.assert_allclose(g.w12, W[:4, 4:], atol=1e-11)
    np.testing.assert_allclose(g.w21, W[4:, :4], atol=1e-11)
    np.testing.assert_allclose(g.w22, W[4:, 4:], atol=1e-11)
    np.testing.assert_allclose(g.w12_hat, t.u_t.T @ W[:4, 4:], atol=1e-11)
    np.testing.assert_allclose(g.w21_hat, W[4:, :4] @ t.v_t, atol=1e-11)
    np.testing.assert_array_equal(g.sigma0_hat, t.trailing_first_term())
    # the leading rotated block is the core's singular values
    np.testing.assert_allclose(g.rotated[:4, :4], np.diag(t.s_t), atol=1e-11)


def test_full_k_blocks(rng):
    ks = random_ksum(3, 2, rng)
    K = kron_sum_dense(ks)
    t = build(ks, 9)
    g = gap_blocks(K, t)
    assert g.w12.shape == (9, 0) and g.w21.shape == (0, 9) and g.w22.shape == (0, 0)
    ubar, vbar = dense_first_bases(t)
    np.testing.assert_allclose(g.w11, ubar.T @ K @ vbar - np.diag(np.kron(t.fsvd.s_a, t.fsvd.s_b)[t.perm.map]), atol=1e-11)


def test_gap_blocks_cap(rng, monkeypatch):
    ks = random_ksum(3, 2, rng)
    t = build(ks, 4)
    K = kron_sum_dense(ks)
    monkeypatch.setenv("KRONSVD_CAP", "8")
    with pytest.raises(CapacityError):
        gap_blocks(K, t)


def test_subspace_bound_blowup_and_invalid(rng):
    ks = random_ksum(3, 3, rng, decay=0.5)
    K = kron_sum_dense(ks)
    t = build(ks, 3)
    g = gap_blocks(K, t)
    trail = np.linalg.norm(g.trailing, 2)
    vals = [signal_subspace_bound(g, trail * (1 + eps)).value for eps in (1e-1, 1e-3, 1e-6)]
    assert vals[0] < vals[1] < vals[2]
    bad = signal_subspace_bound(g, trail)
    assert not bad.valid and math.isnan(bad.value)
    assert not noise_subspace_bound(g, 0.5 * trail).valid


def test_pinv_bound_examples():
    assert pinv_bound(3.0, 1.0, 0.0, 0.0).value == 0.0
    one = pinv_bound(2.0, 0.5, 0.1, 0.0).value
    two = pinv_bound(4.0, 0.5, 0.1, 0.0).value
    assert two == pytest.approx(2 * one, rel=1e-15)
    with pytest.raises(ZeroDivisionError):
        pinv_bound(1.0, 0.0, 0.1, 0.1)
    assert not pinv_bound(1.0, -0.1, 0.1, 0.1).valid


def test_solution_bound_examples():
    assert solution_bound(2.0, 1.0, 1.0, 0.0, 0.0, 0.1, 1.0).value == 0.0
    vals = [solution_bound(2.0, 1.0, 1.0, 0.1, 0.1, r, 1.0).value for r in (0.5, 0.9, 0.999999)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 100 * vals[0]
    assert not solution_bound(2.0, 1.0, 1.0, 0.1, 0.1, 1.0, 1.0).valid
    assert not solution_bound(2.0, 0.0, 1.0, 0.1, 0.1, 0.1, 1.0).valid


def test_bound_value_tags():
    assert BoundValue(0.3).holds_for(0.3 + 1e-10)
    assert not BoundValue(0.3).holds_for(0.31)
    assert not BoundValue.invalid("x").holds_for(0.0)
    assert float(BoundValue(2.5)) == 2.5


def test_exact_build_zero_distance():
    ks = psf_kron_sum(random_psf(3, np.random.default_rng(1)))
    K = kron_sum_dense(ks)
    t = build(ks, 9)
    oracle = dense_svd(K)
    for e in (2, 5, 8):
        assert true_subspace_distance(oracle, t, "signal", e) <= 1e-9
        assert true_subspace_distance(oracle, t, "noise", e) <= 1e-9


def test_orthogonal_subspaces_distance_one(rng):
    t = build(_single(rng, 2), 2)
    U, V = dense_factors(t)
    comp_u = np.linalg.svd(np.eye(4) - U @ U.T)[0][:, :2]
    comp_v = np.linalg.svd(np.eye(4) - V @ V.T)[0][:, :2]
    oracle = DenseSvdTriple(np.column_stack([comp_u, U]), np.array([4.0, 3, 2, 1]), np.column_stack([comp_v, V]))
    assert true_subspace_distance(oracle, t, "signal") == pytest.approx(1.0, abs=1e-12)
    assert true_subspace_distance(oracle, t, "noise") == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        true_subspace_distance(oracle, t, "both")


def test_projector_identity():
    ks = psf_kron_sum(speckle_psf(8))
    K = kron_sum_dense(ks)
    oracle = dense_svd(K)
    t = build(ks, 30)
    for e in (3, 10, 20, 30):
        u_hat, v_hat = approx_bases(t, e)
        Uk, Vk = oracle.u[:, :e], oracle.v[:, :e]
        ps = np.linalg.norm(Uk @ Uk.T - u_hat @ u_hat.T, 2)
        pn = np.linalg.norm(Vk @ Vk.T - v_hat @ v_hat.T, 2)
        assert true_subspace_distance(oracle, t, "signal", e) == pytest.approx(ps, abs=1e-10)
        assert true_subspace_distance(oracle, t, "noise", e) == pytest.approx(pn, abs=1e-10)


@pytest.mark.parametrize("seed", range(6))
def test_bounds_hold_on_small_instances(seed):
    g = np.random.default_rng(seed)
    ks = random_ksum(3, 3, g, decay=0.15)
    K = kron_sum_dense(ks)
    d = K @ g.standard_normal(9)
    for k in (3, 5):
        for rep in bound_sweep(K, build(ks, k), d):
            for b, true in (
                (rep.signal_bound, rep.true_signal_dist),
                (rep.noise_bound, rep.true_noise_dist),
                (rep.pinv_bound, rep.true_pinv_err),
                (rep.solution_bound, rep.true_solution_err),
            ):
                if b.valid:
                    assert b.value >= 0
                    assert true <= b.value + 1e-9
                else:
                    assert math.isnan(b.value)
            assert 0 <= rep.true_signal_dist <= 1 + 1e-12


def test_exact_instance_bounds_zero():
    p = np.outer([1.0, 3.0, 1.5], [2.0, 1.0, 0.5])
    ks = psf_kron_sum(p)
    K = kron_sum_dense(ks)
    d = K @ np.arange(1.0, 10.0)
    rep = evaluate_bounds(K, build(ks, 4), d)
    for b in (rep.signal_bound, rep.noise_bound, rep.pinv_bound, rep.solution_bound):
        assert b.valid and b.value == pytest.approx(0.0, abs=1e-12)


def test_pinv_bound_scale_invariant(rng):
    ks = random_ksum(3, 2, rng, decay=0.1)
    K = kron_sum_dense(ks)
    d = rng.standard_normal(9)
    base = evaluate_bounds(K, build(ks, 4), d)
    c = 7.0
    scaled_ks = KroneckerSum(tuple(KronPair(c * t.a, t.b) for t in ks.terms), c * ks.weights)
    scaled = evaluate_bounds(c * K, build(scaled_ks, 4), d)
    # relative error and its bound are both dimensionless
    assert scaled.pinv_bound.value == pytest.approx(base.pinv_bound.value, rel=1e-9)
    assert scaled.true_pinv_err == pytest.approx(base.true_pinv_err, rel=1e-8)
    assert scaled.sigma1 == pytest.approx(c * base.sigma1, rel=1e-12)


def test_partition_range(rng):
    ks = random_ksum(3, 2, rng)
    g = gap_blocks(kron_sum_dense(ks), build(ks, 4))
    with pytest.raises(ValueError):
        g.partition(5)


def test_report_csv_row(rng):
    ks = random_ksum(3, 2, rng)
    K = kron_sum_dense(ks)
    rep = evaluate_bounds(K, build(ks, 3), rng.standard_normal(9), effective_k=2)
    row = rep.csv_row()
    assert len(row) == len(BoundReport.CSV_HEADER)
    assert row[0] == 2 and isinstance(row[-1], bool)
