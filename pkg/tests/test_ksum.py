import numpy as np
import pytest

from kronsvd.exceptions import DimensionError
from kronsvd.kron_core import KronPair, kron_dense, kron_sum_dense, vec
from kronsvd.ksum import (
    KroneckerSum,
    Psf,
    kron_rank_truncate,
    laplacian_2d,
    psf_kron_sum,
    rearrange,
    toeplitz_from_vector,
    vlp_decompose,
)
from kronsvd.problems import blur_matrix, delta_psf, random_psf

# singular values of the rearranged 9x9 Laplacian, frozen from a verified run
LAPLACIAN_RANK_SVALS = [12.92820323027551, 0.9282032302755085]


def _residuals(K, n):
    R = vlp_decompose(K, n, n * n)
    return [np.linalg.norm(K - kron_sum_dense(R.truncate(r))) for r in range(1, n * n + 1)]


def test_rearrange_kron_is_rank_one(rng):
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    tilde = rearrange(np.kron(A, B), 2)
    np.testing.assert_allclose(tilde, np.outer(vec(A), vec(B)), atol=1e-15)
    s = np.linalg.svd(tilde, compute_uv=False)
    assert s[1] <= 1e-14 * s[0]


def test_rearrange_laplacian_rank_two():
    s = np.linalg.svd(rearrange(laplacian_2d(3), 3), compute_uv=False)
    np.testing.assert_allclose(s[:2], LAPLACIAN_RANK_SVALS, rtol=1e-12)
    assert s[2] <= 1e-12 * s[0]
    assert kron_rank_truncate(s, 1e-10) == 2


def test_rearrange_shape_error():
    with pytest.raises(DimensionError):
        rearrange(np.ones((8, 8)), 3)


def test_vlp_random_dense_exact(rng):
    K = rng.standard_normal((16, 16))
    ks = vlp_decompose(K, 4, 16)
    assert ks.kron_rank_full == 16
    assert np.linalg.norm(K - kron_sum_dense(ks)) <= 1e-11 * np.linalg.norm(K)


def test_vlp_residual_matches_tail_energy(rng):
    K = rng.standard_normal((16, 16))
    s = np.linalg.svd(rearrange(K, 4), compute_uv=False)
    res = _residuals(K, 4)
    for r in (1, 5, 10):
        assert res[r - 1] == pytest.approx(np.sqrt(np.sum(s[r:] ** 2)), rel=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_vlp_residual_non_increasing(rng, n):
    K = rng.standard_normal((n * n, n * n))
    res = _residuals(K, n)
    assert all(b <= a + 1e-12 * res[0] for a, b in zip(res, res[1:]))
    assert res[-1] <= 1e-11 * np.linalg.norm(K)


def test_vlp_kron_single_term(rng):
    A, B = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    K = np.kron(A, B)
    ks = vlp_decompose(K, 3, 1)
    assert np.linalg.norm(K - kron_sum_dense(ks)) <= 1e-12 * np.linalg.norm(K)


def test_vlp_laplacian():
    L = laplacian_2d(3)
    assert np.linalg.norm(L - kron_sum_dense(vlp_decompose(L, 3, 2))) <= 1e-12 * np.linalg.norm(L)
    assert np.linalg.norm(L - kron_sum_dense(vlp_decompose(L, 3, 1))) > 0.5


def test_vlp_errors(rng):
    with pytest.raises(ValueError):
        vlp_decompose(rng.standard_normal((9, 9)), 3, 10)
    with pytest.raises(ValueError):
        vlp_decompose(rng.standard_normal((9, 9)), 3, 0)


def test_first_term_is_nearest_kronecker_product(rng):
    K = rng.standard_normal((16, 16))
    first = kron_dense(vlp_decompose(K, 4, 1).terms[0])
    best = np.linalg.norm(K - first)
    target = np.linalg.norm(first)
    for _ in range(100):
        C = rng.standard_normal((4, 4))
        D = rng.standard_normal((4, 4))
        CD = np.kron(C, D)
        CD *= target / np.linalg.norm(CD)
        assert best <= np.linalg.norm(K - CD) + 1e-12


def test_kron_rank_truncate_examples():
    assert kron_rank_truncate([1.0, 1e-16], 1e-8) == 1
    assert kron_rank_truncate([1.0, 0.5, 0.25], 0.1) == 3
    with pytest.raises(ValueError):
        kron_rank_truncate([])
    with pytest.raises(ValueError):
        kron_rank_truncate([0.0, 0.0])


def test_toeplitz_from_vector():
    T = toeplitz_from_vector([1.0, 2.0, 3.0], 1)
    np.testing.assert_array_equal(T, [[2, 1, 0], [3, 2, 1], [0, 3, 2]])


@pytest.mark.parametrize("n", [1, 4, 7])
def test_delta_psf_identity(n):
    ks = psf_kron_sum(delta_psf(n))
    assert ks.r == 1 and ks.kron_rank_full == 1
    np.testing.assert_array_equal(ks.terms[0].a, np.eye(n))
    np.testing.assert_array_equal(ks.terms[0].b, np.eye(n))


def test_separable_psf_rank_one(rng):
    p, q = rng.random(6) + 0.1, rng.random(6) + 0.1
    psf = Psf(np.outer(p, q))
    ks = psf_kron_sum(psf)
    assert ks.r == 1
    K = blur_matrix(psf)
    assert np.linalg.norm(K - kron_dense(ks.terms[0])) <= 1e-12 * np.linalg.norm(K)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_psf_kron_sum_matches_blur_matrix(n):
    psf = random_psf(n, np.random.default_rng(n))
    K = blur_matrix(psf)
    ks = psf_kron_sum(psf)
    assert ks.r == n
    assert np.linalg.norm(K - kron_sum_dense(ks)) <= 1e-12 * np.linalg.norm(K)
    sv = np.linalg.svd(psf.array, compute_uv=False)
    np.testing.assert_allclose(ks.weights, sv, rtol=1e-13)


def test_psf_kron_sum_off_center(rng):
    psf = Psf(rng.random((5, 5)), (1, 3))
    K = blur_matrix(psf)
    assert np.linalg.norm(K - kron_sum_dense(psf_kron_sum(psf))) <= 1e-12 * np.linalg.norm(K)


def test_psf_kron_sum_rank_limit(rng):
    psf = Psf(np.outer(rng.random(4), rng.random(4)))
    with pytest.raises(ValueError):
        psf_kron_sum(psf, r=2)


def test_psf_validation():
    with pytest.raises(ValueError):
        Psf(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        Psf(-np.ones((3, 3)))
    with pytest.raises(ValueError):
        Psf(np.ones((3, 3)), (3, 0))
    with pytest.raises(DimensionError):
        Psf(np.ones((2, 3)))


def test_psf_default_center_tie_break():
    arr = np.zeros((4, 4))
    arr[2, 1] = arr[1, 3] = 1.0
    assert Psf(arr).center == (1, 3)


def test_kronecker_sum_validation():
    t = KronPair(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        KroneckerSum((t, t), [1.0, 2.0])
    with pytest.raises(ValueError):
        KroneckerSum((), [])
    with pytest.raises(DimensionError):
        KroneckerSum((t,), [1.0, 0.5])
    ks = KroneckerSum((t, t), [2.0, 1.0])
    assert ks.r == 2 and ks.N == 4 and ks.truncate(1).r == 1
