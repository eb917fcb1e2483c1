"""Command-line entry points: run scenarios, sweeps, and render reports."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .scenarios import (
    BoundaryGuardError,
    ConservationError,
    builtin_names,
    builtin_scenario,
    load_config,
    load_sweep,
    run_scenario,
    run_sweep,
)


def _apply_overrides(cfg, args):
    fields = {}
    if args.seed is not None:
        fields["seed"] = args.seed
    if args.L is not None:
        fields["L"] = args.L
    if args.dt is not None:
        fields["dt"] = args.dt
    if args.tolerance is not None:
        fields["tolerance"] = args.tolerance
    return dataclasses.replace(cfg, **fields) if fields else cfg


def _cmd_run(args) -> int:
    if args.scenario in builtin_names():
        cfg = builtin_scenario(args.scenario)
    elif Path(args.scenario).exists():
        cfg = load_config(args.scenario)
    else:
        print(
            f"error: {args.scenario!r} is neither a built-in scenario "
            f"({', '.join(builtin_names())}) nor a config file",
            file=sys.stderr,
        )
        return 2
    cfg = _apply_overrides(cfg, args)
    outdir = Path(args.outdir) if args.outdir else Path("runs") / cfg.name
    try:
        result = run_scenario(cfg, outdir)
    except (BoundaryGuardError, ConservationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{cfg.name}: wrote {len(result.files)} files to {result.outdir}")
    for key, val in result.report.get("conservation", {}).items():
        print(f"  {key} = {val}")
    return 0


def _cmd_sweep(args) -> int:
    configs = load_sweep(args.config)
    configs = [_apply_overrides(c, args) for c in configs]
    outdir = Path(args.outdir) if args.outdir else Path("runs") / "sweep"
    try:
        results = run_sweep(configs, outdir)
    except (BoundaryGuardError, ConservationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for r in results:
        print(f"{r.config.name}: {r.outdir}")
    return 0


def _cmd_report(args) -> int:
    outdir = Path(args.rundir)
    report_path = outdir / "report.txt"
    if not report_path.exists():
        print(f"error: {report_path} not found", file=sys.stderr)
        return 2
    from .seriesio import read_report

    report = read_report(report_path)
    for section, entries in report.items():
        print(f"[{section}]")
        for k, v in entries.items():
            print(f"  {k} = {v}")
    if not args.no_figures:
        from .figures import render_run

        for fig in render_run(outdir):
            print(f"figure: {fig}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beclat", description="Tilted-lattice condensate dynamics toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--outdir", help="output directory (default: runs/<name>)")
        sp.add_argument("--seed", type=int, help="random seed override")
        sp.add_argument("-L", type=int, help="lattice size override")
        sp.add_argument("--dt", type=float, help="integrator step override")
        sp.add_argument("--tolerance", type=float, help="adaptive tolerance override")

    run_p = sub.add_parser("run", help="run a built-in scenario or a config file")
    run_p.add_argument("scenario", help=f"one of {', '.join(builtin_names())} or a config path")
    common(run_p)
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a parameter sweep described by a config file")
    sweep_p.add_argument("config", help="sweep config path")
    common(sweep_p)
    sweep_p.set_defaults(func=_cmd_sweep)

    rep_p = sub.add_parser("report", help="print a run report and render its figures")
    rep_p.add_argument("rundir", help="run directory")
    rep_p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    rep_p.set_defaults(func=_cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
