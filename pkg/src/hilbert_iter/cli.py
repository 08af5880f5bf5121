"""Command-line entry point: ``hilbert-iter {tables,rates,verify,solve}``.

Exit codes: 0 success, 1 property violation, 2 configuration error,
3 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from .bench import (
    METHODS,
    STARTS,
    ConfigError,
    ExperimentConfig,
    RateStudyConfig,
    StudyAborted,
    cmd_rates,
    cmd_solve,
    cmd_tables,
    coerce_solve_options,
    read_config,
)
from .errors import NonTermination, NumericalFailure
from .problems import VARIANTS

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _csv_list(cast):
    def parse(text):
        return tuple(cast(v.strip()) for v in str(text).split(",") if v.strip())
    return parse


def _add_common(p):
    p.add_argument("--config", type=Path, help="key=value file; flags override its values")
    p.add_argument("--variant", help=f"comma list from {sorted(VARIANTS)}")
    p.add_argument("--m", type=int)
    p.add_argument("--seed", "--seeds", dest="seed", help="seed or comma list of seeds")
    p.add_argument("--method", help=f"comma list from {METHODS}")
    p.add_argument("--s", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--out", type=Path, default=Path("results"))


def build_parser():
    parser = argparse.ArgumentParser(prog="hilbert-iter", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", help="reproduce the deriv2 result tables")
    _add_common(p)
    p.add_argument("--sigma", type=float)
    p.add_argument("--start", help=f"comma list from {STARTS}")
    p.add_argument("--q", type=float)

    p = sub.add_parser("rates", help="log-log convergence-rate study")
    _add_common(p)
    p.add_argument("--sigmas", help="comma list of relative noise levels, decreasing")

    sub.add_parser("verify", help="run the property suites")

    p = sub.add_parser("solve", help="single run with a full trace")
    p.add_argument("config_file", type=Path, nargs="?")
    p.add_argument("--variant")
    p.add_argument("--m", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--method")
    p.add_argument("--start")
    p.add_argument("--s", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--out", type=Path, default=Path("results"))
    return parser


def _file_options(path):
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    sections = read_config(text)
    merged = {}
    for sec in sections.values():
        merged.update(sec)
    return merged


_LIST_KEYS = {
    "variant": ("variant", _csv_list(str)),
    "seed": ("seeds", _csv_list(int)),
    "seeds": ("seeds", _csv_list(int)),
    "method": ("methods", _csv_list(str)),
    "methods": ("methods", _csv_list(str)),
    "start": ("starts", _csv_list(str)),
    "starts": ("starts", _csv_list(str)),
    "sigmas": ("sigmas", _csv_list(float)),
}
_SCALAR_KEYS = {"m": int, "sigma": float, "s": float, "C": float, "q": float, "max_iter": int}


def _experiment_options(args, allowed):
    raw = _file_options(getattr(args, "config", None))
    for key in list(_LIST_KEYS) + list(_SCALAR_KEYS):
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    opts = {}
    for key, val in raw.items():
        try:
            if key in _LIST_KEYS:
                name, cast = _LIST_KEYS[key]
                opts[name] = cast(val)
            elif key in _SCALAR_KEYS:
                opts[key] = _SCALAR_KEYS[key](val)
            else:
                raise ConfigError(f"unknown key {key!r}", field=key)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value {val!r}", field=key) from exc
    for key in opts:
        if key not in allowed:
            raise ConfigError(f"key not valid for this command", field=key)
    return opts


def _run_tables(args):
    opts = _experiment_options(args, {"variant", "m", "sigma", "seeds", "methods", "starts", "s", "C", "q", "max_iter"})
    variants = opts.pop("variant", ("i", "ii", "iii"))
    for v in variants:
        cfg = ExperimentConfig(variant=v, **opts)
        rows, _ = cmd_tables(cfg, args.out)
        print((args.out / f"tables_{v}.md").read_text())
        if any(r["status"].startswith("failed") for r in rows):
            return EXIT_NUMERIC
    return EXIT_OK


def _run_rates(args):
    opts = _experiment_options(args, {"variant", "m", "sigmas", "seeds", "methods", "s", "C"})
    variants = opts.pop("variant", ("i", "ii", "iii"))
    for v in variants:
        cfg = RateStudyConfig(variant=v, **opts)
        res = cmd_rates(cfg, args.out)
        for method, r in res.items():
            exp = "n/a" if r["expected"] is None else f"{r['expected']:.3f}"
            print(f"variant {v} {method}: slope {r['slope']:.3f} (residual {r['residual']:.3f}, theory {exp})")
    return EXIT_OK


def _run_verify(args):
    from .verify import SUITES

    failed = 0
    for name, suite in SUITES.items():
        violations = suite()
        print(f"{name:14s} {'ok' if not violations else f'{len(violations)} violation(s)'}")
        for v in violations[:20]:
            print(f"  [{v.module}] {v.prop}: {v.witness}")
        failed += len(violations)
    return EXIT_VIOLATION if failed else EXIT_OK


def _run_solve(args):
    raw = _file_options(args.config_file)
    for key in ("variant", "m", "sigma", "seed", "method", "start", "s", "C", "q"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    opts = coerce_solve_options(raw)
    rep, path = cmd_solve(opts, args.out)
    print(f"{rep.method}: n={rep.n} alpha_n={rep.alpha_n:.3e} d_n={rep.d_n:.3e} "
          f"e_n={rep.e_n:.3e} status={rep.status}")
    print(f"trace written to {path}")
    return EXIT_OK


COMMANDS = {"tables": _run_tables, "rates": _run_rates, "verify": _run_verify, "solve": _run_solve}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StudyAborted as exc:
        print(f"rate study aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NumericalFailure, NonTermination) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
