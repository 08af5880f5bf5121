"""Implicit iteration in Hilbert scales.

One step maps ``x_prev`` to

    x = x_prev - (A^T A + alpha B^{2s})^{-1} A^T (A x_prev - y_delta)

and ``n`` steps with ``alpha_1..alpha_n`` regularize like Tikhonov with
parameter ``1/sigma_n``, ``sigma_n = sum 1/alpha_k``.  This module holds
the step itself, run bookkeeping and the geometric-sequence driver.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionError, NonTermination, NotSPDError, NumericalFailure
from .filters import AlphaSequence
from .hilbert_scale import build_scale_operator, power_matrix, scale_norm
from .spectral_core import spd_factor, spd_solve

__all__ = [
    "IterationConfig",
    "TraceRow",
    "IterationState",
    "RunReport",
    "LinearSetup",
    "implicit_step",
    "discrepancy",
    "error_norm",
    "run_sequence",
    "run_geometric",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IterationConfig:
    s: float = 1.0
    x0: np.ndarray = None
    C: float = 1.1
    max_iter: int = 100

    def __post_init__(self):
        if not self.C >= 1:
            raise ValueError(f"C must be >= 1, got {self.C}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class TraceRow:
    k: int
    alpha: float
    sigma: float
    d: float
    e: float = float("nan")
    e_s: float = float("nan")
    r: float = float("nan")


@dataclass
class IterationState:
    """Current iterate of a run plus its history."""

    x: np.ndarray
    d: float
    k: int = 0
    seq: AlphaSequence = field(default_factory=AlphaSequence)
    log: list = field(default_factory=list)


@dataclass
class RunReport:
    method: str
    n: int
    alpha_n: float
    sigma_n: float
    d_n: float
    e_n: float
    trace: list
    x: np.ndarray = field(repr=False, default=None)
    initial: TraceRow = None
    delta: float = float("nan")
    status: str = "ok"
    extras: dict = field(default_factory=dict)


@lru_cache(maxsize=8)
def _scale_op(m):
    return build_scale_operator(m)


@lru_cache(maxsize=16)
def _penalty(m, s):
    return power_matrix(_scale_op(m), 2 * s)


class LinearSetup:
    """Quantities shared by every step of a run on one data set.

    ``A^T A``, ``A^T y_delta`` and the penalty ``B^{2s}`` are formed once.
    """

    def __init__(self, A, y_delta, delta, s=1.0, x0=None, x_true=None, S=None):
        self.A = np.asarray(A, dtype=float)
        m = self.A.shape[1]
        self.y_delta = np.asarray(y_delta, dtype=float)
        if self.A.shape[0] != self.y_delta.shape[0]:
            raise DimensionError("A and y_delta disagree in length")
        self.delta = float(delta)
        self.s = float(s)
        self.S = S if S is not None else _scale_op(m)
        self.B2s = _penalty(m, self.s) if S is None else power_matrix(S, 2 * self.s)
        self.AtA = self.A.T @ self.A
        self.AtA = 0.5 * (self.AtA + self.AtA.T)
        self.Aty = self.A.T @ self.y_delta
        self.x0 = np.zeros(m) if x0 is None else np.asarray(x0, dtype=float)
        self.x_true = None if x_true is None else np.asarray(x_true, dtype=float)

    @classmethod
    def from_problem(cls, problem, noisy, cfg):
        return cls(problem.A, noisy.y_delta, noisy.delta, s=cfg.s, x0=cfg.x0, x_true=problem.x_true)

    def factor(self, alpha):
        try:
            return spd_factor(self.AtA + alpha * self.B2s)
        except NotSPDError as exc:
            raise NumericalFailure(f"step matrix not SPD at alpha={alpha:g} (pivot {exc.pivot})") from exc

    def step(self, alpha, x_prev, F=None):
        """One implicit step; returns ``(x, F)`` so callers may reuse ``F``."""
        F = F if F is not None else self.factor(alpha)
        grad = self.AtA @ x_prev - self.Aty
        return x_prev - spd_solve(F, grad), F

    def discrepancy(self, x):
        return float(np.linalg.norm(self.A @ x - self.y_delta))

    def row(self, k, alpha, sigma, x, **kw):
        e = e_s = float("nan")
        if self.x_true is not None:
            e = float(np.linalg.norm(x - self.x_true))
            e_s = scale_norm(self.S, self.s, x - self.x_true)
        return TraceRow(k=k, alpha=alpha, sigma=sigma, d=self.discrepancy(x), e=e, e_s=e_s, **kw)


def implicit_step(A, B2s, alpha, x_prev, y_delta):
    """Return ``x_prev - (A^T A + alpha B2s)^{-1} A^T (A x_prev - y_delta)``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    A = np.asarray(A, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    if B2s.shape != (A.shape[1], A.shape[1]) or x_prev.shape[0] != A.shape[1]:
        raise DimensionError("inconsistent dimensions")
    AtA = A.T @ A
    M = 0.5 * (AtA + AtA.T) + alpha * np.asarray(B2s)
    try:
        F = spd_factor(M)
    except NotSPDError as exc:
        raise NumericalFailure(f"step matrix not SPD at alpha={alpha:g}") from exc
    return x_prev - spd_solve(F, A.T @ (A @ x_prev - y_delta))


def discrepancy(A, x, y_delta):
    """Residual norm ``||A x - y_delta||_2``."""
    return float(np.linalg.norm(np.asarray(A) @ x - y_delta))


def error_norm(S, r, x, x_true):
    return scale_norm(S, r, np.asarray(x) - np.asarray(x_true))


def run_sequence(setup, alphas):
    """Apply the iteration with a fixed list of parameters; no stopping rule."""
    x = setup.x0.copy()
    for alpha in alphas:
        x, _ = setup.step(alpha, x)
    return x


def _report(method, setup, state, initial, **extras):
    last = state.log[-1] if state.log else initial
    return RunReport(
        method=method,
        n=state.k,
        alpha_n=last.alpha,
        sigma_n=state.seq.sigma_n,
        d_n=state.d,
        e_n=last.e,
        trace=list(state.log),
        x=state.x,
        initial=initial,
        delta=setup.delta,
        extras=extras,
    )


def _early_exit(method, setup, state, initial, C):
    """Report for runs that need no step (feasible start or zero noise)."""
    if setup.delta <= 0:
        status = "degenerate-noiseless"
    elif state.d <= C * setup.delta:
        status = "already-feasible"
    else:
        return None
    rep = _report(method, setup, state, initial)
    rep.status = status
    return rep


def run_geometric(problem, noisy, cfg, alpha1, q=0.5, setup=None):
    """Implicit iteration with ``alpha_k = q**(k-1) alpha1`` and the discrepancy stop.

    Stops at the first ``n`` with ``||A x_n - y_delta|| <= C delta``.  The
    report carries whether ``1/alpha_n <= sigma_{n-1} / q`` held at the end.
    """
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if not alpha1 > 0:
        raise ValueError(f"alpha1 must be positive, got {alpha1}")
    setup = setup or LinearSetup.from_problem(problem, noisy, cfg)
    state = IterationState(x=setup.x0.copy(), d=setup.discrepancy(setup.x0))
    initial = setup.row(0, float("nan"), 0.0, state.x)
    target = cfg.C * setup.delta
    early = _early_exit("IIM/GS", setup, state, initial, cfg.C)
    if early is not None:
        return early
    alpha = float(alpha1)
    while state.d > target:
        if state.k >= cfg.max_iter:
            raise NonTermination(f"IIM/GS: no stop after {cfg.max_iter} steps", state.log)
        sigma_prev = state.seq.sigma_n
        state.x, _ = setup.step(alpha, state.x)
        state.k += 1
        state.seq = state.seq.append(alpha)
        row = setup.row(state.k, alpha, state.seq.sigma_n, state.x)
        state.d = row.d
        state.log.append(row)
        log.debug("IIM/GS k=%d alpha=%.3e d=%.3e", state.k, alpha, state.d)
        alpha *= q
    alpha_n = state.log[-1].alpha
    return _report("IIM/GS", setup, state, initial,
                   step_ratio_ok=bool(1.0 / alpha_n <= sigma_prev / q),
                   step_ratio=(1.0 / alpha_n) / sigma_prev if sigma_prev > 0 else float("inf"))
