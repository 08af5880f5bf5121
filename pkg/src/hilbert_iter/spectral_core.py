"""Dense linear algebra kernels.

Closed-form eigenpairs of the Dirichlet second-difference matrix, a thin
Cholesky wrapper over LAPACK and an SVD used by the test oracles.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import DimensionError, NotSPDError, NumericalFailure

__all__ = [
    "SymEigen",
    "SpdFactorization",
    "Svd",
    "laplacian_eigen",
    "spd_factor",
    "spd_solve",
    "svd",
]


@dataclass(frozen=True)
class SymEigen:
    """Eigendecomposition ``M = V diag(w) V^T`` with ascending ``w``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class SpdFactorization:
    """Lower Cholesky factor ``L`` with ``M = L L^T``."""

    factor: np.ndarray

    @property
    def dim(self):
        return self.factor.shape[0]


@dataclass(frozen=True)
class Svd:
    """Full SVD ``M = U diag(s) V^T``; ``s`` descending."""

    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray


def laplacian_eigen(m):
    """Analytic eigenpairs of ``tridiag(-1, 2, -1)`` of size ``m``.

    The k-th eigenvalue is ``2 - 2 cos(k pi / (m+1))`` with eigenvector
    ``sqrt(2/(m+1)) sin(j k pi / (m+1))``, ``j, k = 1..m``.
    """
    m = int(m)
    if m < 1:
        raise DimensionError(f"dimension must be positive, got {m}")
    k = np.arange(1, m + 1)
    theta = k * np.pi / (m + 1)
    # 4 sin^2(theta/2) avoids cancellation in 2 - 2 cos(theta) for small k
    w = 4.0 * np.sin(theta / 2.0) ** 2
    v = np.sqrt(2.0 / (m + 1)) * np.sin(np.outer(k, theta))
    return SymEigen(eigenvalues=w, eigenvectors=v)


def spd_factor(M, sym_tol=1e-10):
    """Cholesky-factor a symmetric positive definite matrix.

    Raises
    ------
    NotSPDError
        If a non-positive pivot is met; ``err.pivot`` is zero-based.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericalFailure("matrix has non-finite entries")
    scale = np.max(np.abs(M)) if M.size else 0.0
    if np.max(np.abs(M - M.T), initial=0.0) > sym_tol * scale:
        raise DimensionError("matrix is not symmetric")
    c, info = lapack.dpotrf(M, lower=1, clean=1)
    if info > 0:
        raise NotSPDError(info - 1)
    if info < 0:
        raise NumericalFailure(f"dpotrf: illegal argument {-info}")
    return SpdFactorization(factor=c)


def spd_solve(F, rhs):
    """Solve ``M x = rhs`` given ``F = spd_factor(M)``."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != F.dim:
        raise DimensionError(f"rhs has length {rhs.shape[0]}, expected {F.dim}")
    x, info = lapack.dpotrs(F.factor, rhs, lower=1)
    if info != 0:
        raise NumericalFailure(f"dpotrs failed with info={info}")
    return x


def svd(M):
    """Full singular value decomposition."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise NumericalFailure("matrix has non-finite entries")
    try:
        u, s, vt = np.linalg.svd(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    return Svd(u=u, s=s, vt=vt)
