"""Property suites backing ``hilbert-iter verify``.

Each suite returns a list of :class:`Violation`; an empty list means the
property held on every sampled instance.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .filters import AlphaSequence, check_properties, eval_g, eval_r, oracle_solution
from .hilbert_scale import build_scale_operator, power_matrix
from .iteration import IterationConfig, LinearSetup, run_geometric, run_sequence
from .param_rules import (
    AprioriInputs,
    algorithm1,
    alpha_upper_bound,
    apriori_sigma_inv,
    newton_dp_tikhonov,
    power_index,
)
from .problems import add_noise, galerkin_deriv2, make_problem
from .spectral_core import svd

__all__ = ["Violation", "SUITES", "run_all"]

FILTER_TOL = 1e-12
ORACLE_TOL = 1e-8


@dataclass(frozen=True)
class Violation:
    module: str
    prop: str
    witness: str


def random_alpha_sequence(rng, n_max=20, lo=1e-8, hi=1e3):
    n = int(rng.integers(1, n_max + 1))
    return AlphaSequence(tuple(10 ** rng.uniform(np.log10(lo), np.log10(hi), n)))


def suite_filter_properties(seed=0, count=1000):
    rng = np.random.default_rng(seed)
    grid = np.logspace(-10, 2, 200)
    out = []
    for i in range(count):
        seq = random_alpha_sequence(rng)
        rep = check_properties(seq, grid)
        for name, val in rep.items():
            if val > FILTER_TOL:
                out.append(Violation("filters", name, f"sample {i}: alphas={seq.alphas}, violation={val:.3e}"))
        # appending an alpha lowers r_n; strictly wherever lam/alpha is resolvable
        extra = 10 ** rng.uniform(-8, 3)
        r_old, r_new = eval_r(seq, grid), eval_r(seq.append(extra), grid)
        strict = (grid / extra > 1e-8) & (r_old > 1e-250)
        if np.any(r_new > r_old) or np.any(r_new[strict] >= r_old[strict]):
            out.append(Violation("filters", "r_decreasing", f"sample {i}: alphas={seq.alphas} + {extra}"))
    return out


def oracle_instances(seed=1, count=120, m_max=50, n_max=10):
    """Random ``(m, n, s, alphas, y, x0)`` instances on ``deriv2`` matrices."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        m = int(rng.integers(2, m_max + 1))
        n = int(rng.integers(1, n_max + 1))
        s = float(rng.choice([0.0, 0.5, 1.0, 2.0]))
        alphas = tuple(10 ** rng.uniform(-8, 0, n))
        y = 1e-2 * rng.standard_normal(m)
        x0 = 0.1 * rng.standard_normal(m)
        yield m, n, s, alphas, y, x0


def suite_oracle_equivalence(seed=1, count=120):
    out = []
    for m, n, s, alphas, y, x0 in oracle_instances(seed, count):
        A = galerkin_deriv2(m)
        S = build_scale_operator(m)
        setup = LinearSetup(A, y, 0.0, s=s, x0=x0, S=S)
        xi = run_sequence(setup, alphas)
        xo = oracle_solution(A, S, s, AlphaSequence(alphas), y, x0)
        err = np.linalg.norm(xi - xo) / np.linalg.norm(xo)
        if not err <= ORACLE_TOL:
            out.append(Violation("iteration", "oracle_equivalence", f"m={m} n={n} s={s} rel={err:.3e}"))
        # residual of the iterate vs r_n(T T^T) applied to the initial residual
        dec = svd(A @ power_matrix(S, -s))
        b = y - A @ x0
        pred = dec.u @ (np.atleast_1d(eval_r(AlphaSequence(alphas), dec.s**2)) * (dec.u.T @ b))
        d_pred = np.linalg.norm(pred)
        d_iter = np.linalg.norm(A @ xi - y)
        if abs(d_pred - d_iter) > ORACLE_TOL * max(d_iter, np.linalg.norm(b) * 1e-6):
            out.append(Violation("iteration", "residual_product_form",
                                 f"m={m} n={n} s={s} d_iter={d_iter:.6e} d_pred={d_pred:.6e}"))
    return out


def _deriv2_runs(variants=("i", "ii", "iii"), seeds=(1, 2, 3), m=400, sigma=0.01):
    cfg = IterationConfig()
    for v in variants:
        problem = make_problem(v, m)
        for seed in seeds:
            noisy = add_noise(problem.y, sigma, seed)
            setup = LinearSetup.from_problem(problem, noisy, cfg)
            yield v, seed, problem, noisy, cfg, setup


def _decreasing_while_above(report, delta):
    """Witnesses where the s-norm error failed to drop while ``d_k >= delta``."""
    rows = [report.initial] + report.trace
    bad = []
    for k in range(1, len(rows)):
        if rows[k].d >= delta and not rows[k].e_s < rows[k - 1].e_s:
            bad.append(f"k={k}: {rows[k - 1].e_s:.6e} -> {rows[k].e_s:.6e}")
    return bad


def suite_iteration_monotonicity(**kw):
    out = []
    for v, seed, problem, noisy, cfg, setup in _deriv2_runs(**kw):
        bound = alpha_upper_bound(setup.A, setup.S, setup.s, setup.y_delta, setup.x0, 1.0, setup.delta)
        for rep in (algorithm1(problem, noisy, cfg, setup=setup),
                    run_geometric(problem, noisy, cfg, bound, setup=setup),
                    run_geometric(problem, noisy, cfg, 1.0, setup=setup)):
            ds = [rep.initial.d] + [r.d for r in rep.trace]
            if np.any(np.diff(ds) >= 0):
                out.append(Violation("iteration", "discrepancy_decreasing", f"{v}/{seed}/{rep.method}: {ds}"))
            for w in _decreasing_while_above(rep, setup.delta):
                out.append(Violation("iteration", "error_decreasing", f"{v}/{seed}/{rep.method} {w}"))
    return out


def suite_newton_structure(**kw):
    out = []
    for v, seed, problem, noisy, cfg, setup in _deriv2_runs(**kw):
        tag = f"{v}/seed={seed}"
        for start in (None, 1.0):
            try:
                a1 = algorithm1(problem, noisy, cfg, alpha1=start, setup=setup)
            except NumericalFailure as exc:
                out.append(Violation("param_rules", "alpha_decreasing", f"{tag}: IIM/A1 broke down: {exc}"))
                continue
            alphas = [r.alpha for r in a1.trace]
            if np.any(np.diff(alphas) >= 0):
                out.append(Violation("param_rules", "alpha_decreasing", f"{tag}: alphas={alphas}"))
            try:
                ti = newton_dp_tikhonov(problem, noisy, cfg, alpha1=start, setup=setup)
            except NumericalFailure as exc:
                out.append(Violation("param_rules", "newton_r_increasing", f"{tag}: TI/DP broke down: {exc}"))
                continue
            rs = [r.r for r in ti.trace]
            if np.any(np.diff(rs) <= 0):
                out.append(Violation("param_rules", "newton_r_increasing", f"{tag}: r={rs}"))
            if a1.n > ti.n:
                out.append(Violation("param_rules", "a1_not_slower", f"{tag}: n_A1={a1.n} > m_TI={ti.n}"))
            bound = alpha_upper_bound(setup.A, setup.S, setup.s, setup.y_delta, setup.x0, cfg.C, setup.delta)
            if not ti.alpha_n < bound:
                out.append(Violation("param_rules", "upper_bound", f"{tag}: alpha={ti.alpha_n:.3e} >= {bound:.3e}"))
            for rep in (a1, ti):
                target = cfg.C * setup.delta
                prev = rep.trace[-2].d if rep.n >= 2 else rep.initial.d
                if not (rep.d_n <= target < prev):
                    out.append(Violation("param_rules", "bracketing", f"{tag}/{rep.method}: d_n={rep.d_n:.3e}"))
            if a1.n >= 2 and not np.isfinite(a1.extras["step_ratio"]):
                out.append(Violation("param_rules", "step_ratio_finite", f"{tag}: {a1.extras}"))
    return out


def suite_apriori(seed=2, count=200):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        a = rng.uniform(0.5, 4)
        inputs = AprioriInputs(
            p=rng.uniform(0.1, 4), E=10 ** rng.uniform(-1, 1), m_link=10 ** rng.uniform(-2, 0),
            s=rng.uniform(0, 3), delta=10 ** rng.uniform(-6, -3), rho=power_index(a),
        )
        closed = apriori_sigma_inv(inputs, closed_form=True)
        general = apriori_sigma_inv(inputs, closed_form=False)
        if abs(closed - general) > 1e-10 * closed:
            out.append(Violation("param_rules", "apriori_dual_path", f"{inputs}: {closed} vs {general}"))
    return out


SUITES = {
    "filters": suite_filter_properties,
    "oracle": suite_oracle_equivalence,
    "monotonicity": suite_iteration_monotonicity,
    "newton": suite_newton_structure,
    "apriori": suite_apriori,
}


def run_all():
    """Run every suite; returns ``{suite name: [Violation, ...]}``."""
    return {name: fn() for name, fn in SUITES.items()}
