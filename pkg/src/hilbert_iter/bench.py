"""Experiment drivers: table reproduction, rate studies, single runs.

CSV floats are written with ``repr`` (shortest round-trip form) and rows
are sorted before writing, so identical configurations give identical
files.
"""

import configparser
import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InfeasibleStart, NonTermination, NumericalFailure
from .iteration import IterationConfig, LinearSetup, run_geometric
from .param_rules import algorithm1, alpha_upper_bound, newton_dp_tikhonov
from .problems import VARIANTS, add_noise, make_problem

__all__ = [
    "METHODS",
    "STARTS",
    "ConfigError",
    "StudyAborted",
    "ExperimentConfig",
    "RateStudyConfig",
    "run_method",
    "cmd_tables",
    "cmd_rates",
    "cmd_solve",
    "read_config",
]

log = logging.getLogger(__name__)

METHODS = ("TI/DP", "IIM/A1", "IIM/GS")
STARTS = ("bound", "one")
TABLE_HEADER = ["method", "start", "seed", "n", "alpha_n", "sigma_n", "d_n", "e_n", "status"]
TRACE_HEADER = ["k", "alpha_k", "sigma_k", "d_k", "e_k", "e_s_k"]
RATES_HEADER = ["method", "sigma", "delta", "seed", "n", "d_n", "e_n", "status"]


class ConfigError(ValueError):
    """Bad configuration value; ``field`` names the offending key."""

    def __init__(self, msg, field=None, line=None):
        self.field = field
        self.line = line
        where = f" (field {field!r})" if field else ""
        where += f" (line {line})" if line else ""
        super().__init__(msg + where)


class StudyAborted(RuntimeError):
    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


@dataclass(frozen=True)
class ExperimentConfig:
    variant: str = "i"
    m: int = 400
    sigma: float = 0.01
    seeds: tuple = tuple(range(1, 11))
    methods: tuple = METHODS
    starts: tuple = STARTS
    s: float = 1.0
    C: float = 1.1
    q: float = 0.5
    max_iter: int = 100

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}", field="variant")
        for mth in self.methods:
            if mth not in METHODS:
                raise ConfigError(f"unknown method {mth!r}; expected one of {METHODS}", field="method")
        for st in self.starts:
            if st not in STARTS:
                raise ConfigError(f"unknown start {st!r}; expected one of {STARTS}", field="start")
        if self.m < 2:
            raise ConfigError("m must be >= 2", field="m")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative", field="sigma")
        if self.C < 1:
            raise ConfigError("C must be >= 1", field="C")
        if not 0 < self.q < 1:
            raise ConfigError("q must lie in (0, 1)", field="q")

    def iteration_config(self):
        return IterationConfig(s=self.s, C=self.C, max_iter=self.max_iter)


@dataclass(frozen=True)
class RateStudyConfig:
    variant: str = "ii"
    m: int = 400
    sigmas: tuple = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
    seeds: tuple = tuple(range(1, 11))
    methods: tuple = ("IIM/A1",)
    s: float = 1.0
    C: float = 1.1

    def __post_init__(self):
        if len(self.sigmas) < 4:
            raise ConfigError("rate study needs at least 4 noise levels", field="sigmas")
        if np.any(np.diff(self.sigmas) >= 0):
            raise ConfigError("noise ladder must be strictly decreasing", field="sigmas")

    @property
    def expected_slope(self):
        """``p0 / (a + p0)`` for the variant; ``None`` when ``p0`` is infinite."""
        p0 = VARIANTS[self.variant]
        return None if np.isinf(p0) else p0 / (2.0 + p0)


def run_method(method, start, problem, noisy, cfg, q=0.5, setup=None):
    """Run one method from one start; returns a :class:`RunReport`."""
    setup = setup or LinearSetup.from_problem(problem, noisy, cfg)
    alpha1 = 1.0 if start == "one" else None
    if method == "TI/DP":
        return newton_dp_tikhonov(problem, noisy, cfg, alpha1=alpha1, setup=setup)
    if method == "IIM/A1":
        return algorithm1(problem, noisy, cfg, alpha1=alpha1, setup=setup)
    if method == "IIM/GS":
        if alpha1 is None and setup.delta > 0:
            try:
                alpha1 = alpha_upper_bound(setup.A, setup.S, setup.s, setup.y_delta, setup.x0, 1.0, setup.delta)
            except InfeasibleStart:
                alpha1 = 1.0  # run_geometric returns n=0 anyway
        return run_geometric(problem, noisy, cfg, alpha1 or 1.0, q=q, setup=setup)
    raise ConfigError(f"unknown method {method!r}", field="method")


def _safe_run(method, start, problem, noisy, cfg, q, setup):
    try:
        rep = run_method(method, start, problem, noisy, cfg, q=q, setup=setup)
    except (NumericalFailure, NonTermination) as exc:
        log.warning("%s/%s seed=%s failed: %s", method, start, noisy.seed, exc)
        return None, f"failed:{type(exc).__name__}"
    status = rep.status
    if status == "ok" and not rep.d_n <= cfg.C * noisy.delta:
        status = "infeasible"
    return rep, status


def table_runs(cfg):
    """All ``(method, start, seed)`` runs of a table. Returns a list of dicts."""
    problem = make_problem(cfg.variant, cfg.m)
    icfg = cfg.iteration_config()
    rows = []
    for seed in sorted(cfg.seeds):
        noisy = add_noise(problem.y, cfg.sigma, seed)
        setup = LinearSetup.from_problem(problem, noisy, icfg)
        for start in cfg.starts:
            for method in cfg.methods:
                rep, status = _safe_run(method, start, problem, noisy, icfg, cfg.q, setup)
                rows.append({"method": method, "start": start, "seed": seed, "report": rep,
                             "status": status, "delta": noisy.delta})
    return rows


def _row_values(rep):
    if rep is None:
        return [None, float("nan"), float("nan"), float("nan"), float("nan")]
    return [rep.n, rep.alpha_n, rep.sigma_n, rep.d_n, rep.e_n]


def _medians(runs):
    ok = [r["report"] for r in runs if r["report"] is not None]
    if not ok:
        return [None] + [float("nan")] * 4
    vals = np.array([[rep.n, rep.alpha_n, rep.sigma_n, rep.d_n, rep.e_n] for rep in ok], dtype=float)
    med = np.median(vals, axis=0)
    n = med[0]
    return [int(n) if n == int(n) else float(n)] + [float(v) for v in med[1:]]


def summarize(rows):
    """Median ``(n, alpha_n, sigma_n, d_n, e_n)`` per ``(start, method)``."""
    out = {}
    for start in STARTS:
        for method in METHODS:
            sel = [r for r in rows if r["start"] == start and r["method"] == method]
            if sel:
                out[start, method] = _medians(sel)
    return out


def cmd_tables(cfg, out_dir):
    """Reproduce one results table; writes ``tables_<variant>.csv`` and ``.md``.

    Returns ``(rows, summary)``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = table_runs(cfg)
    summary = summarize(rows)
    order = {m: i for i, m in enumerate(METHODS)}
    sorted_rows = sorted(rows, key=lambda r: (STARTS.index(r["start"]), order[r["method"]], r["seed"]))
    with open(out_dir / f"tables_{cfg.variant}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_HEADER)
        for r in sorted_rows:
            w.writerow([_fmt(v) for v in [r["method"], r["start"], r["seed"], *_row_values(r["report"]), r["status"]]])
        for (start, method), med in summary.items():
            w.writerow([_fmt(v) for v in [method, start, "median", *med, "median"]])
    (out_dir / f"tables_{cfg.variant}.md").write_text(render_markdown(cfg, summary, rows))
    return rows, summary


def render_markdown(cfg, summary, rows):
    delta = rows[0]["delta"] if rows else float("nan")
    lines = [
        f"Variant ({cfg.variant}), m={cfg.m}, sigma={cfg.sigma:g} (delta = {delta:.3g}), "
        f"medians over {len(cfg.seeds)} seeds.",
        "",
    ]
    for start in cfg.starts:
        label = "alpha_1 from the upper bound" if start == "bound" else "alpha_1 = 1"
        lines += [f"**{label}**", "", "| method | n | alpha_n | d_n | e_n |", "|---|---|---|---|---|"]
        for method in cfg.methods:
            n, a, _, d, e = summary[start, method]
            lines.append(f"| {method} | {n} | {a:.2e} | {d:.2e} | {e:.2e} |")
        lines.append("")
    return "\n".join(lines)


def fit_slope(deltas, errors):
    """Least-squares slope of ``log e`` against ``log delta``; returns ``(slope, rms residual)``."""
    x, y = np.log(deltas), np.log(errors)
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return float(coef[0]), rms


def cmd_rates(cfg, out_dir=None):
    """Convergence-rate study; returns ``{method: {"slope", "residual", "deltas", "medians"}}``."""
    problem = make_problem(cfg.variant, cfg.m)
    icfg = IterationConfig(s=cfg.s, C=cfg.C)
    ynorm = float(np.linalg.norm(problem.y))
    records = []
    result = {}
    for method in cfg.methods:
        deltas, medians = [], []
        for sigma in cfg.sigmas:
            errs = []
            for seed in sorted(cfg.seeds):
                noisy = add_noise(problem.y, sigma, seed)
                rep, status = _safe_run(method, "bound", problem, noisy, icfg, 0.5, None)
                records.append([method, sigma, noisy.delta, seed, *(
                    [rep.n, rep.d_n, rep.e_n] if rep else [None, float("nan"), float("nan")]), status])
                if rep is not None:
                    errs.append(rep.e_n)
            if not errs:
                partial = {"records": records, "result": result}
                raise StudyAborted(f"all runs failed at sigma={sigma:g} for {method}", partial)
            deltas.append(sigma * ynorm)
            medians.append(float(np.median(errs)))
        slope, resid = fit_slope(deltas, medians)
        result[method] = {"slope": slope, "residual": resid, "deltas": deltas, "medians": medians,
                          "expected": cfg.expected_slope}
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / f"rates_{cfg.variant}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RATES_HEADER)
            for rec in records:
                w.writerow([_fmt(v) for v in rec])
        md = [f"Variant ({cfg.variant}), m={cfg.m}", "", "| method | slope | residual | expected |", "|---|---|---|---|"]
        for method, r in result.items():
            exp = "-" if r["expected"] is None else f"{r['expected']:.3f}"
            md.append(f"| {method} | {r['slope']:.3f} | {r['residual']:.3f} | {exp} |")
        (out_dir / f"rates_{cfg.variant}.md").write_text("\n".join(md) + "\n")
    return result


# -- single runs from a key=value config -------------------------------------

_SOLVE_KEYS = {
    "variant": str, "m": int, "sigma": float, "seed": int, "method": str,
    "start": str, "s": float, "C": float, "q": float, "max_iter": int,
}


def read_config(text):
    """Parse flat ``key = value`` text (optional ``[section]`` headers).

    Returns ``{section: {key: raw value}}``; keys outside a section land in
    ``"run"``.
    """
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    parser.optionxform = str  # keep case: C vs c
    offset = 0
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
        offset = 1
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] - offset if exc.errors else None
        raise ConfigError(f"cannot parse config: {exc.errors[0][1].strip() if exc.errors else exc}",
                          line=lineno) from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    return {sec: dict(parser[sec]) for sec in parser.sections()}


def coerce_solve_options(raw):
    opts = {}
    for key, val in raw.items():
        if key not in _SOLVE_KEYS:
            raise ConfigError(f"unknown key {key!r}", field=key)
        try:
            opts[key] = _SOLVE_KEYS[key](val)
        except ValueError as exc:
            raise ConfigError(f"bad value {val!r}", field=key) from exc
    return opts


def cmd_solve(options, out_dir):
    """One run of one method; writes ``trace_<method>_<seed>.csv``.

    ``options`` holds already-coerced keys from :data:`_SOLVE_KEYS`.
    Returns ``(report, trace path)``.
    """
    seed = options.get("seed", 1)
    cfg = ExperimentConfig(
        variant=options.get("variant", "i"), m=options.get("m", 400),
        sigma=options.get("sigma", 0.01), seeds=(seed,),
        methods=(options.get("method", "IIM/A1"),), starts=(options.get("start", "bound"),),
        s=options.get("s", 1.0), C=options.get("C", 1.1), q=options.get("q", 0.5),
        max_iter=options.get("max_iter", 100),
    )
    problem = make_problem(cfg.variant, cfg.m)
    noisy = add_noise(problem.y, cfg.sigma, seed)
    rep = run_method(cfg.methods[0], cfg.starts[0], problem, noisy, cfg.iteration_config(), q=cfg.q)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"trace_{cfg.methods[0].replace('/', '-')}_{seed}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for row in rep.trace:
            w.writerow([_fmt(v) for v in (row.k, row.alpha, row.sigma, row.d, row.e, row.e_s)])
    return rep, path
