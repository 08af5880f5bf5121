"""Discrete Hilbert scale generated by a first-order differential operator.

``B = B2**(1/2)`` where ``B2 = (m+1)**2 / pi**2 * tridiag(-1, 2, -1)``.
Eigenvalues of ``B`` approximate ``1, 2, 3, ...`` for modes well below
``m``; fractional powers are taken spectrally in the sine basis.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError
from .spectral_core import SymEigen, laplacian_eigen

__all__ = ["ScaleOperator", "build_scale_operator", "apply_power", "scale_norm", "power_matrix"]


@dataclass(frozen=True, eq=False)
class ScaleOperator:
    m: int
    scale: float
    eig: SymEigen

    @cached_property
    def mu(self):
        """Eigenvalues of ``B``, strictly increasing."""
        return np.sqrt(self.scale * self.eig.eigenvalues)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.m:
            raise DimensionError(f"vector has length {x.shape[0]}, expected {self.m}")
        return x


def build_scale_operator(m):
    m = int(m)
    if m < 1:
        raise DimensionError(f"dimension must be positive, got {m}")
    return ScaleOperator(m=m, scale=(m + 1) ** 2 / np.pi**2, eig=laplacian_eigen(m))


def apply_power(S, r, x):
    """Return ``B**r @ x``. Negative ``r`` gives powers of ``G = B**-1``."""
    x = S._check(x)
    V = S.eig.eigenvectors
    return V @ (S.mu**r * (V.T @ x))


def scale_norm(S, r, x):
    """The scale norm ``||B**r x||_2``."""
    x = S._check(x)
    # V is orthogonal, so the norm can be read off in the eigenbasis
    return float(np.linalg.norm(S.mu**r * (S.eig.eigenvectors.T @ x)))


def power_matrix(S, r):
    """Dense symmetric matrix ``V diag(mu**r) V^T``."""
    V = S.eig.eigenvectors
    P = (V * S.mu**r) @ V.T
    return 0.5 * (P + P.T)
