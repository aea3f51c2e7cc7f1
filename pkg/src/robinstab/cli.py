"""Command-line front end.

Subcommands: ``analyze`` (classification, peaks, instability-radius verdict),
``sweep`` (one parameter swept with optional bisection of status changes),
``simulate`` (linear closed-loop time response), and ``models list``.

All artifacts go to files under --out; a short human-readable summary goes
to standard output.  Exit codes: 0 success, 2 configuration error,
3 analysis error.
"""

import argparse
import os
import sys

from ._version import __version__
from .errors import AnalysisError, ConfigError
from .report import (
    AnalysisConfig,
    build_perturbation,
    build_plant,
    export_freq_response_csv,
    export_report_json,
    export_sweep_csv,
    export_timeseries_csv,
    run_analysis,
    run_sweep,
)
from .simulate import simulate_linear

_MODEL_HELP = [
    ("explicit", "num/den coefficient lists, lowest degree first"),
    ("cyclic", "ring of 2m+1 first-order agents, fields: m, k"),
    ("maglev", "levitation plant, fields: p, tau, k, variant(full|reduced), compensate"),
    ("repressilator", "delayed gene loop, fields: tau, alpha1..3, k, pade_order"),
]


def _parser():
    p = argparse.ArgumentParser(
        prog="robinstab",
        description="Robust instability analysis of unstable SISO rational systems",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="classify a plant and decide its instability radius")
    pa.add_argument("--config", required=True, help="JSON configuration file")
    pa.add_argument("--out", required=True, help="output directory")
    pa.add_argument(
        "--format",
        choices=["json", "csv", "all"],
        default="all",
        help="artifacts to write (default: all)",
    )

    ps = sub.add_parser("sweep", help="sweep one plant parameter")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out", required=True)
    ps.add_argument("--param", required=True, help="plant parameter to sweep")
    ps.add_argument("--range", required=True, metavar="LO:HI", help="sweep range")
    ps.add_argument("--steps", type=int, default=21)
    ps.add_argument(
        "--refine",
        action="store_true",
        help="bisect status-change brackets to width 1e-3",
    )

    pm = sub.add_parser("simulate", help="simulate the linear closed loop")
    pm.add_argument("--config", required=True)
    pm.add_argument("--out", required=True)
    pm.add_argument("--horizon", type=float, default=100.0, help="duration [s]")
    pm.add_argument("--dt", type=float, default=0.01, help="fixed step [s]")
    pm.add_argument(
        "--input",
        default="impulse",
        help='"impulse" or "random:SEED" initial state',
    )

    pl = sub.add_parser("models", help="model-related utilities")
    pl.add_argument("action", choices=["list"])
    return p


def _ensure_out(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from exc


def _cmd_analyze(args) -> int:
    config = AnalysisConfig.load(args.config)
    _ensure_out(args.out)
    report = run_analysis(config)
    wrote = []
    if args.format in ("json", "all"):
        path = os.path.join(args.out, "report.json")
        export_report_json(report, path)
        wrote.append(path)
    if args.format in ("csv", "all"):
        path = os.path.join(args.out, "freq_response.csv")
        export_freq_response_csv(build_plant(config.plant), report, path)
        wrote.append(path)
    tag = report.class_tag
    print(
        f"class: {tag.shape.value}, unstable poles: {tag.n_unstable}, "
        f"PIP: {'ok' if tag.pip_ok else 'violated'}"
    )
    for peak, margin in zip(report.peaks.peaks, report.pcr_margins):
        label = "global" if peak.is_global else "local"
        print(
            f"peak ({label}): w={peak.freq:.6g} gain={peak.gain:.6g} "
            f"pcr_margin={margin:+.6g}"
        )
    print(f"verdict: {report.rir.status.value}, radius in {report.rir.interval_str()}")
    for note in report.rir.notes:
        print(f"note: {note}")
    for path in wrote:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    config = AnalysisConfig.load(args.config)
    _ensure_out(args.out)
    try:
        lo, hi = (float(v) for v in args.range.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad --range {args.range!r}; expected LO:HI") from exc
    result = run_sweep(config, args.param, lo, hi, args.steps, refine=args.refine)
    path = os.path.join(args.out, f"sweep_{args.param}.csv")
    export_sweep_csv(result, path)
    print(f"swept {args.param} over [{lo:g}, {hi:g}] in {len(result.rows)} steps")
    for tr in result.transitions:
        print(
            f"transition in [{tr.lo:.6g}, {tr.hi:.6g}]: "
            f"{tr.status_lo} -> {tr.status_hi}"
        )
    if not result.transitions:
        print("no status changes detected")
    print(f"wrote {path}")
    return 0


def _cmd_simulate(args) -> int:
    config = AnalysisConfig.load(args.config)
    _ensure_out(args.out)
    if args.input == "impulse":
        input_kind, seed = "impulse", 0
    elif args.input.startswith("random:"):
        input_kind = "initial-state-random"
        try:
            seed = int(args.input.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad --input {args.input!r}") from exc
    else:
        raise ConfigError(f'bad --input {args.input!r}; use "impulse" or "random:SEED"')
    g = build_plant(config.plant)
    # the full analysis is only needed when the perturbation is built from
    # a gain peak; plain simulations must work for stable plants too
    needs_report = (config.perturbation or {}).get("type") == "marginal"
    report = run_analysis(config) if needs_report else None
    delta = build_perturbation(config, report)
    series = simulate_linear(
        g, delta, horizon=args.horizon, dt=args.dt, input_kind=input_kind, seed=seed
    )
    path = os.path.join(args.out, "timeseries.csv")
    export_timeseries_csv(series, path)
    peak = float(max(abs(series.y)))
    print(
        f"simulated {args.horizon:g} time units at dt={args.dt:g}; "
        f"|y| peak {peak:.6g}, final {abs(series.y[-1]):.6g}"
    )
    print(f"wrote {path}")
    return 0


def _cmd_models(args) -> int:
    for name, desc in _MODEL_HELP:
        print(f"{name:14s} {desc}")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "sweep": _cmd_sweep,
        "simulate": _cmd_simulate,
        "models": _cmd_models,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AnalysisError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
