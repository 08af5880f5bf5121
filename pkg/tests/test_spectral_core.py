import numpy as np
import pytest

from hilbert_iter.errors import DimensionError, NotSPDError
from hilbert_iter.spectral_core import laplacian_eigen, spd_factor, spd_solve, svd

from conftest import random_spd


def tridiag(m):
    return 2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)


def test_laplacian_m1():
    e = laplacian_eigen(1)
    np.testing.assert_allclose(e.eigenvalues, [2.0], rtol=1e-15)
    np.testing.assert_allclose(np.abs(e.eigenvectors), [[1.0]], rtol=1e-15)


def test_laplacian_m2():
    # 2 - 2 cos(pi/3) = 1, 2 - 2 cos(2 pi/3) = 3
    np.testing.assert_allclose(laplacian_eigen(2).eigenvalues, [1.0, 3.0], rtol=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 17, 100, 500])
def test_laplacian_eigenpairs(m):
    e = laplacian_eigen(m)
    V, w = e.eigenvectors, e.eigenvalues
    res = tridiag(m) @ V - V * w
    assert np.max(np.linalg.norm(res, axis=0)) <= 1e-12
    assert np.max(np.abs(V.T @ V - np.eye(m))) <= 1e-12
    assert np.all(np.diff(w) > 0)


def test_laplacian_rejects_zero():
    with pytest.raises(DimensionError):
        laplacian_eigen(0)


def test_spd_factor_identity():
    F = spd_factor(np.eye(5))
    np.testing.assert_array_equal(F.factor, np.eye(5))
    r = np.arange(5.0)
    np.testing.assert_array_equal(spd_solve(F, r), r)


def test_spd_factor_scalar():
    np.testing.assert_allclose(spd_factor([[4.0]]).factor, [[2.0]])


def test_spd_solve_diag():
    np.testing.assert_allclose(spd_solve(spd_factor(np.diag([2.0, 4.0])), [2.0, 4.0]), [1.0, 1.0])


@pytest.mark.parametrize("n", [5, 20, 50])
def test_spd_round_trip(rng, n):
    M = random_spd(rng, n, cond=1e4)
    F = spd_factor(M)
    np.testing.assert_allclose(F.factor @ F.factor.T, M, rtol=0, atol=1e-10 * np.abs(M).max())
    for _ in range(5):
        b = rng.standard_normal(n)
        x = spd_solve(F, b)
        assert np.linalg.norm(M @ x - b) <= 1e-10 * np.linalg.norm(b)


@pytest.mark.parametrize("cond", [1e2, 1e6, 1e8])
def test_spd_backward_error(rng, cond):
    # ||M x - b|| / (||M|| ||x|| + ||b||): the attainable measure once cond * eps > 1e-10
    M = random_spd(rng, 40, cond)
    F = spd_factor(M)
    for _ in range(5):
        b = rng.standard_normal(40)
        x = spd_solve(F, b)
        err = np.linalg.norm(M @ x - b) / (np.linalg.norm(M, 2) * np.linalg.norm(x) + np.linalg.norm(b))
        assert err <= 1e-10


def test_not_spd_reports_pivot():
    M = np.diag([1.0, 2.0, -1.0, 4.0])
    with pytest.raises(NotSPDError) as info:
        spd_factor(M)
    assert info.value.pivot == 2


def test_rejects_asymmetric():
    with pytest.raises(DimensionError):
        spd_factor([[2.0, 1.0], [0.0, 2.0]])


def test_solve_length_mismatch():
    with pytest.raises(DimensionError):
        spd_solve(spd_factor(np.eye(3)), np.ones(4))


def test_svd_diag():
    np.testing.assert_allclose(svd(np.diag([3.0, 1.0])).s, [3.0, 1.0])


def test_svd_zero():
    np.testing.assert_array_equal(svd(np.zeros((4, 4))).s, np.zeros(4))


def test_svd_against_symmetric_eigen(rng):
    M = rng.standard_normal((10, 10))
    d = svd(M)
    oracle = np.sqrt(np.clip(np.linalg.eigvalsh(M.T @ M), 0, None))[::-1]
    np.testing.assert_allclose(d.s, oracle, rtol=1e-8)
    np.testing.assert_allclose(d.u * d.s @ d.vt, M, atol=1e-8 * np.abs(M).max())
    np.testing.assert_allclose(d.u.T @ d.u, np.eye(10), atol=1e-12)
