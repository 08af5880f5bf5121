"""Parameter choice: a priori rule, discrepancy-principle solvers.

Three discrepancy-principle drivers are provided, all stopping at the
first iterate with ``||A x - y_delta|| <= C delta``:

* :func:`newton_dp_tikhonov` -- single-step (Tikhonov) regularization,
  ``1/alpha`` updated by Newton's method on ``1/d(r) - 1/delta = 0``.
* :func:`algorithm1` -- the implicit iteration, with one Newton update
  of ``1/alpha`` per step, continuing from the previous iterate.
* :func:`hilbert_iter.iteration.run_geometric` -- geometric parameters.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleStart, NonTermination, NumericalFailure
from .filters import AlphaSequence
from .iteration import IterationState, LinearSetup, _early_exit, _report
from .hilbert_scale import apply_power
from .spectral_core import spd_solve

__all__ = [
    "IndexFunction",
    "AprioriInputs",
    "NewtonDpState",
    "power_index",
    "psi_p",
    "psi_p_inverse",
    "apriori_sigma_inv",
    "alpha_upper_bound",
    "newton_dp_tikhonov",
    "algorithm1",
]

log = logging.getLogger(__name__)

_TINY = 1e-300


@dataclass(frozen=True)
class IndexFunction:
    """Continuous strictly increasing ``rho`` on ``(0, t_max]`` with ``rho(0+) = 0``.

    ``power`` holds the exponent ``a`` when ``rho(t) = t**a``; this enables
    closed-form inverses.
    """

    evaluator: object
    t_max: float = 1.0
    power: float = None

    def __call__(self, t):
        return self.evaluator(t)

    def validate(self, n=200):
        t = np.logspace(-12, 0, n) * self.t_max
        v = np.array([self(ti) for ti in t])
        return bool(np.all(np.diff(v) > 0) and v[0] < self(2 * t[0]) and v[0] >= 0)


def power_index(a, t_max=1.0):
    a = float(a)
    return IndexFunction(evaluator=lambda t: t**a, t_max=t_max, power=a)


@dataclass(frozen=True)
class AprioriInputs:
    p: float
    E: float
    m_link: float
    s: float
    delta: float
    rho: IndexFunction
    a: float = None


@dataclass
class NewtonDpState:
    r: float
    x: np.ndarray
    d: float
    converged: bool = False


def psi_p(rho, p, t):
    """``t**p * rho(t)``."""
    if not 0 < t <= rho.t_max:
        raise DomainError(f"t={t} outside (0, {rho.t_max}]")
    return t**p * rho(t)


def psi_p_inverse(rho, p, v, rtol=1e-12):
    """Solve ``psi_p(t) = v`` for ``t``.

    Closed form ``v**(1/(p+a))`` when ``rho`` is a power, bisection in
    ``log t`` otherwise.
    """
    vmax = psi_p(rho, p, rho.t_max)
    if not 0 < v <= vmax:
        raise DomainError(f"v={v} outside (0, {vmax}]")
    if rho.power is not None:
        return v ** (1.0 / (p + rho.power))
    hi = rho.t_max
    lo = hi
    while psi_p(rho, p, lo) > v:
        lo *= 0.5
        if lo < 1e-300:
            raise DomainError(f"no preimage of v={v} found")
    # bisect on a geometric scale; psi_p(lo) <= v <= psi_p(hi)
    while hi - lo > rtol * hi:
        mid = np.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            mid = 0.5 * (lo + hi)
        if psi_p(rho, p, mid) > v:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def apriori_sigma_inv(inputs, closed_form=None):
    """A priori choice ``1/sigma_n = (delta/E)**2 * psi_p^{-1}(delta/(m E))**(2(s-p))``.

    For ``rho(t) = t**a`` this equals ``m**2 (delta/(m E))**(2(s+a)/(a+p))``;
    that branch is used when ``closed_form`` is true (default: whenever the
    power is known).
    """
    p, E, mlink, s, delta = inputs.p, inputs.E, inputs.m_link, inputs.s, inputs.delta
    if min(p, E, mlink, delta) <= 0:
        raise DomainError("p, E, m_link and delta must be positive")
    a = inputs.a if inputs.a is not None else inputs.rho.power
    if closed_form is None:
        closed_form = a is not None
    v = delta / (mlink * E)
    if closed_form:
        if a is None:
            raise DomainError("closed form needs a power-type index function")
        # same range check as the general path
        psi_p(inputs.rho, p, inputs.rho.t_max)
        if v > inputs.rho.t_max ** (p + a):
            raise DomainError(f"delta/(mE)={v} outside the range of psi_p")
        return mlink**2 * v ** (2 * (s + a) / (a + p))
    t = psi_p_inverse(inputs.rho, p, v)
    return (delta / E) ** 2 * t ** (2 * (s - p))


def alpha_upper_bound(A, S, s, y_delta, x0, C, delta):
    """Upper bound for the discrepancy-principle Tikhonov parameter.

    ``C delta ||G^s A^T b||^2 / ((||b|| - C delta) ||b||^2)`` with
    ``b = y_delta - A x0``.
    """
    b = np.asarray(y_delta, dtype=float) - np.asarray(A) @ x0
    bn = float(np.linalg.norm(b))
    if not bn > C * delta:
        raise InfeasibleStart(f"||y_delta - A x0|| = {bn:.3e} <= C delta = {C * delta:.3e}")
    Atb = np.asarray(A).T @ b
    num = float(Atb @ apply_power(S, -2 * s, Atb))  # ||G^s A^T b||^2
    return C * delta * num / ((bn - C * delta) * bn**2)


def _newton_denominator(alpha, curv, d):
    """Derivative of ``1/d(r)`` w.r.t. ``r = 1/alpha``."""
    return alpha**3 * curv / d**3


def _newton_update(setup, F, alpha, x, x_base, d, delta):
    """``1/alpha`` after one Newton step on ``g(r) = 1/d(r) - 1/delta``.

    ``F`` factors ``A^T A + alpha B^{2s}``, the matrix that produced ``x``
    from ``x_base``.
    """
    w = setup.B2s @ (x - x_base)
    v = spd_solve(F, w)
    curv = float(v @ w)
    if curv < _TINY or d < _TINY:
        raise NumericalFailure(f"Newton denominator underflow (curv={curv:.3e}, d={d:.3e})")
    r_old = 1.0 / alpha
    g = 1.0 / d - 1.0 / delta
    dg = _newton_denominator(alpha, curv, d)
    r_new = r_old - g / dg
    if not r_new > r_old:
        raise NumericalFailure(f"Newton step did not increase r ({r_old:.6e} -> {r_new:.6e})")
    return r_new


def _start_alpha(setup, alpha1):
    if alpha1 is not None:
        return float(alpha1)
    return alpha_upper_bound(setup.A, setup.S, setup.s, setup.y_delta, setup.x0, 1.0, setup.delta)


def newton_dp_tikhonov(problem, noisy, cfg, alpha1=None, setup=None):
    """Tikhonov regularization with the discrepancy parameter found by Newton.

    Computes ``x(beta) = x0 - (A^T A + beta B^{2s})^{-1} A^T (A x0 - y_delta)``
    for ``beta_k = 1/r_k``, with ``r_1 = 1/alpha1`` (default: the upper
    bound with ``C = 1``) and Newton updates aimed at ``d = delta``.  Stops at
    the first ``k`` with ``d <= C delta``; ``n`` in the report is that ``k``.
    """
    setup = setup or LinearSetup.from_problem(problem, noisy, cfg)
    x0 = setup.x0
    state = IterationState(x=x0.copy(), d=setup.discrepancy(x0))
    initial = setup.row(0, float("nan"), 0.0, x0)
    target = cfg.C * setup.delta
    early = _early_exit("TI/DP", setup, state, initial, cfg.C)
    if early is not None:
        return early
    alpha = _start_alpha(setup, alpha1)
    nstate = NewtonDpState(r=1.0 / alpha, x=x0, d=state.d)
    while True:
        if state.k >= cfg.max_iter:
            raise NonTermination(f"TI/DP: no stop after {cfg.max_iter} steps", state.log)
        x, F = setup.step(alpha, x0)
        state.k += 1
        row = setup.row(state.k, alpha, 1.0 / alpha, x, r=1.0 / alpha)
        state.log.append(row)
        state.x, state.d = x, row.d
        nstate.x, nstate.d, nstate.r = x, row.d, 1.0 / alpha
        log.debug("TI/DP k=%d alpha=%.3e d=%.3e", state.k, alpha, row.d)
        if state.d <= target:
            nstate.converged = True
            break
        alpha = 1.0 / _newton_update(setup, F, alpha, x, x0, state.d, setup.delta)
    state.seq = AlphaSequence((alpha,))
    return _report("TI/DP", setup, state, initial)


def algorithm1(problem, noisy, cfg, alpha1=None, setup=None):
    """Implicit iteration with Newton-chosen parameters.

    Step 1 uses ``alpha1`` (default: the upper bound with ``C = 1``).  While
    ``d > C delta``, ``1/alpha`` receives one Newton update for the equation
    ``||A x_k(1/r) - y_delta|| = delta`` built on the last step, and the
    next implicit step is taken from the current iterate.

    ``extras`` records ``step_ratio = (1/alpha_n) / sigma_{n-1}`` and, for
    ``n >= 2``, ``swap_residual``: the discrepancy of the step from
    ``x_{n-2}`` taken with ``alpha_n`` instead of ``alpha_{n-1}``.
    """
    setup = setup or LinearSetup.from_problem(problem, noisy, cfg)
    state = IterationState(x=setup.x0.copy(), d=setup.discrepancy(setup.x0))
    initial = setup.row(0, float("nan"), 0.0, state.x)
    delta, target = setup.delta, cfg.C * setup.delta
    early = _early_exit("IIM/A1", setup, state, initial, cfg.C)
    if early is not None:
        return early
    alpha = _start_alpha(setup, alpha1)
    x_base = state.x
    x, F = setup.step(alpha, x_base)
    history = [x_base]
    while True:
        state.k += 1
        state.seq = state.seq.append(alpha)
        row = setup.row(state.k, alpha, state.seq.sigma_n, x)
        state.log.append(row)
        state.x, state.d = x, row.d
        log.debug("IIM/A1 k=%d alpha=%.3e d=%.3e", state.k, alpha, row.d)
        if state.d <= target:
            break
        if state.k >= cfg.max_iter:
            raise NonTermination(f"IIM/A1: no stop after {cfg.max_iter} steps", state.log)
        r = _newton_update(setup, F, alpha, x, x_base, state.d, delta)
        x_base, alpha = x, 1.0 / r
        history.append(x_base)
        x, F = setup.step(alpha, x_base)

    extras = {}
    n = state.k
    if n >= 2:
        sigma_prev = state.seq.sigma_n - 1.0 / state.seq.alphas[-1]
        extras["step_ratio"] = (1.0 / state.seq.alphas[-1]) / sigma_prev
        x_swap, _ = setup.step(state.seq.alphas[-1], history[-2])
        extras["swap_residual"] = setup.discrepancy(x_swap)
    return _report("IIM/A1", setup, state, initial, **extras)
