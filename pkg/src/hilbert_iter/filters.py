"""Spectral filter of the implicit iteration and an SVD solution oracle.

After ``n`` steps with parameters ``alpha_1..alpha_n`` the iteration acts on
the spectrum of ``T^T T`` (``T = A G^s``) through

    r_n(lam) = prod_k alpha_k / (lam + alpha_k)
    g_n(lam) = (1 - r_n(lam)) / lam

``sigma_n = sum_k 1/alpha_k`` plays the role of the regularization
parameter.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .hilbert_scale import power_matrix
from .spectral_core import svd

__all__ = ["AlphaSequence", "eval_g", "eval_r", "check_properties", "oracle_solution"]


@dataclass(frozen=True)
class AlphaSequence:
    alphas: tuple = ()
    sigma_n: float = field(init=False)

    def __post_init__(self):
        a = tuple(float(v) for v in self.alphas)
        if any(not (v > 0 and np.isfinite(v)) for v in a):
            raise DomainError("all alpha_k must be positive and finite")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "sigma_n", float(np.sum(1.0 / np.array(a))) if a else 0.0)

    def __len__(self):
        return len(self.alphas)

    def append(self, alpha):
        return AlphaSequence(self.alphas + (alpha,))


def _log_r(seq, lam):
    alphas = np.asarray(seq.alphas)
    lam = np.asarray(lam, dtype=float)
    if alphas.size == 0:
        return np.zeros_like(lam)
    return -np.sum(np.log1p(lam[..., None] / alphas), axis=-1)


def eval_r(seq, lam):
    """Residual filter ``r_n(lam)``; accepts scalars or arrays."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise DomainError("lambda must be nonnegative")
    out = np.exp(_log_r(seq, lam))
    return float(out) if out.ndim == 0 else out


def eval_g(seq, lam):
    """Filter ``g_n(lam) = (1 - r_n(lam)) / lam`` for ``lam > 0``.

    ``1 - r_n`` is evaluated as ``-expm1(log r_n)`` so the result keeps full
    relative accuracy as ``lam -> 0``, where ``g_n -> sigma_n``.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise DomainError("lambda must be positive")
    out = -np.expm1(_log_r(seq, lam)) / lam
    return float(out) if out.ndim == 0 else out


def check_properties(seq, lambda_grid):
    """Largest violation of each filter inequality over a grid.

    Every entry is a normalized, nonnegative violation (0 means the
    inequality holds):

    ``g_le_sigma``       g_n <= sigma_n
    ``lam_g_le_1``       lam g_n <= 1
    ``lam_r_le_inv``     lam r_n <= 1/sigma_n
    ``r_le_g_over``      r_n <= g_n / sigma_n
    ``identity``         |lam g_n + r_n - 1|
    """
    lam = np.asarray(lambda_grid, dtype=float)
    if lam.size == 0 or np.any(lam <= 0):
        raise DomainError("grid must be nonempty and positive")
    g = np.atleast_1d(eval_g(seq, lam))
    r = np.atleast_1d(eval_r(seq, lam))
    sig = seq.sigma_n
    if sig == 0:
        # n = 0: g = 0, r = 1; only the identity is meaningful
        return {"g_le_sigma": 0.0, "lam_g_le_1": 0.0, "lam_r_le_inv": 0.0,
                "r_le_g_over": 0.0, "identity": float(np.max(np.abs(lam * g + r - 1)))}
    pos = lambda v: float(max(0.0, np.max(v)))
    return {
        "g_le_sigma": pos(g / sig - 1.0),
        "lam_g_le_1": pos(lam * g - 1.0),
        "lam_r_le_inv": pos(lam * r * sig - 1.0),
        "r_le_g_over": pos((r * sig - g) / g),
        "identity": float(np.max(np.abs(lam * g + r - 1.0))),
    }


def oracle_solution(A, S, s, seq, y_delta, x0):
    """Closed-form n-step iterate via the SVD of ``T = A G^s``.

    Returns ``x0 + G^s V diag(g_n(sv^2) sv) U^T (y_delta - A x0)``.
    """
    A = np.asarray(A, dtype=float)
    y_delta = np.asarray(y_delta, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if A.shape != (S.m, S.m) or y_delta.shape[0] != A.shape[0] or x0.shape[0] != S.m:
        raise DimensionError("inconsistent dimensions")
    if len(seq) == 0:
        return x0.copy()
    Gs = power_matrix(S, -s)
    dec = svd(A @ Gs)
    sv = dec.s
    coef = np.zeros_like(sv)
    nz = sv > 0
    coef[nz] = np.atleast_1d(eval_g(seq, sv[nz] ** 2)) * sv[nz]
    b = y_delta - A @ x0
    return x0 + Gs @ (dec.vt.T @ (coef * (dec.u.T @ b)))
