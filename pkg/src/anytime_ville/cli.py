"""Command-line interface.

Subcommands: ``bound`` (crossing-probability brackets and the continuous
relaxation), ``simulate`` (floor-hugger Monte Carlo), ``lil-curve``
(time-uniform envelope as plot-ready CSV), ``coverage`` (empirical
envelope coverage). Machine-readable output only: JSON records or CSV
with a header row, floats at 17 significant digits. All randomness flows
from an explicit ``--seed``. Exit codes: 0 success, 1 numerical failure,
2 validation error (a diverging continuous bound is reported in-band,
not an error).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .curves import curve_from_spec
from .errors import AnytimeVilleError
from .floorhugger import FloorHuggerConfig, dump_paths_csv, simulate
from .lil import LilParams, explicit_bound, implicit_rhs, simpler_bound
from .simharness import CoverageConfig, run_coverage
from .ville import BoundQuery, continuous_bound, crossing_bound

_FMT = "%.17g"


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("ANYTIME_VILLE_THREADS")
    return max(1, int(env)) if env else 1


def _cmd_bound(args) -> int:
    f = curve_from_spec(args.f)
    g = curve_from_spec(args.g)
    if args.describe:
        _write(json.dumps({"f": f.to_spec(), "g": g.to_spec()}) + "\n", args.output)
        return 0
    if args.m0 is None:
        print("error: the --m0 flag is required (initial expectation m0)",
              file=sys.stderr)
        return 2
    if args.continuous:
        res = continuous_bound(f, g, args.m0)
        record = {"lower": res.value, "upper": res.value, "divergent": res.divergent}
    else:
        bracket = crossing_bound(BoundQuery(f, g, args.m0, args.horizon))
        record = {"lower": bracket.lower, "upper": bracket.upper, "divergent": False}
    _write(json.dumps(record) + "\n", args.output)
    return 0


def _cmd_simulate(args) -> int:
    cfg = FloorHuggerConfig(
        f=curve_from_spec(args.f),
        g=curve_from_spec(args.g),
        m0=args.m0,
        horizon=args.horizon,
        n_paths=args.paths,
        seed=args.seed,
    )
    summary = simulate(cfg, threads=_threads(args))
    if args.dump_paths:
        dump_paths_csv(args.dump_paths, cfg)
    record = {
        "n_paths": summary.n_paths,
        "n_crossed": summary.n_crossed,
        "empirical_prob": summary.empirical_prob,
        "std_error": summary.std_error,
    }
    _write(json.dumps(record) + "\n", args.output)
    return 0


def _lil_grid(n_max: int, kind: str) -> np.ndarray:
    if n_max < 0:
        raise ValueError("--n-max must be nonnegative")
    if kind == "linear":
        return np.arange(n_max + 1, dtype=np.float64)
    if n_max < 1:
        return np.array([0.0])
    pts = np.geomspace(1.0, float(n_max), 512)
    return np.concatenate([[0.0], pts])


def _cmd_lil_curve(args) -> int:
    p = LilParams(args.delta, args.kappa)
    grid = _lil_grid(args.n_max, args.grid)
    k = args.kappa
    if args.form == "implicit":
        values = implicit_rhs(grid, p)
    else:
        form = explicit_bound if args.form == "explicit" else simpler_bound
        rescaled_time = grid / (k * k)
        values = (k * np.sqrt(rescaled_time + 1.0) * form(rescaled_time, p)
                  / np.sqrt(grid + 1.0))
    lines = ["n,bound"]
    lines += [f"{_FMT % n},{_FMT % v}" for n, v in zip(grid, values)]
    _write("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_coverage(args) -> int:
    cfg = CoverageConfig(
        delta=args.delta,
        n_steps=args.steps,
        n_reps=args.reps,
        seed=args.seed,
        kappa=args.kappa,
    )
    report = run_coverage(cfg, threads=_threads(args))
    record = {
        "delta": cfg.delta,
        "kappa": cfg.kappa,
        "n_steps": cfg.n_steps,
        "n_reps": report.n_reps,
        "distribution": cfg.distribution,
        "violations": report.violations,
        "violation_rate": report.violation_rate,
        "first_violation_times": {str(k): v
                                  for k, v in report.first_violation_times.items()},
    }
    _write(json.dumps(record) + "\n", args.output)
    if args.histogram:
        lines = ["t,count"]
        lines += [f"{t},{c}" for t, c in report.first_violation_times.items()]
        with open(args.histogram, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anytime-ville",
        description="Crossing bounds for monotone floor/threshold pairs, "
                    "floor-hugger simulation, and finite-time LIL envelopes.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="internal parallelism (default: $ANYTIME_VILLE_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="crossing-probability bound for a curve pair")
    b.add_argument("--f", required=True, help="floor curve JSON spec")
    b.add_argument("--g", required=True, help="threshold curve JSON spec")
    b.add_argument("--m0", type=float, default=None, help="initial expectation")
    b.add_argument("--horizon", type=int, default=None,
                   help="product truncation horizon (default 1e6)")
    b.add_argument("--continuous", action="store_true",
                   help="evaluate the continuous relaxation instead")
    b.add_argument("--describe", action="store_true",
                   help="echo the parsed curves as canonical JSON and exit")
    b.add_argument("-o", "--output", default=None)
    b.set_defaults(func=_cmd_bound)

    s = sub.add_parser("simulate", help="floor-hugger Monte Carlo")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--m0", type=float, required=True)
    s.add_argument("--horizon", type=int, required=True)
    s.add_argument("--paths", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--dump-paths", default=None, metavar="FILE",
                   help="write per-step path values as CSV path_id,n,M,K")
    s.add_argument("-o", "--output", default=None)
    s.set_defaults(func=_cmd_simulate)

    c = sub.add_parser("lil-curve", help="time-uniform envelope as CSV n,bound")
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--kappa", type=float, default=1.0)
    c.add_argument("--n-max", type=int, required=True)
    c.add_argument("--grid", choices=["log", "linear"], default="linear")
    c.add_argument("--form", choices=["explicit", "simpler", "implicit"],
                   default="explicit",
                   help="implicit emits the threshold on I and ignores --kappa")
    c.add_argument("-o", "--output", default=None)
    c.set_defaults(func=_cmd_lil_curve)

    v = sub.add_parser("coverage", help="empirical envelope coverage experiment")
    v.add_argument("--delta", type=float, required=True)
    v.add_argument("--steps", type=int, required=True)
    v.add_argument("--reps", type=int, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--kappa", type=float, default=1.0)
    v.add_argument("--histogram", default=None, metavar="FILE",
                   help="write first-violation histogram CSV t,count")
    v.add_argument("-o", "--output", default=None)
    v.set_defaults(func=_cmd_coverage)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AnytimeVilleError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OverflowError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
