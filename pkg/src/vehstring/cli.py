"""Command-line front end: validate, schedule, simulate, sweep, tiat.

Outputs are written under ``out/<scenario-stem>/<command>/`` and existing
files are only overwritten with ``--force``.

Exit codes: 0 clean, 1 invalid input, 2 safety violation, 3 incomplete run.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from .engine import (
    STATUS_INCOMPLETE,
    STATUS_OK,
    STATUS_SAFETY_VIOLATION,
    run,
)
from .model import Scenario, load_scenario, validate_scenario
from .scheduler import (
    occupancy_bound,
    schedule,
    t_fol_plus_sign,
    t_iat_analytic,
    t_iat_numeric,
    t_nom,
    v_underline,
)
from .model import RoadParams


def _load(path: str) -> Scenario:
    try:
        return load_scenario(path)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: cannot read scenario {path}: {exc}", file=sys.stderr)
        raise SystemExit(1)


def _outdir(scenario_path: str, command: str, out_root: str) -> Path:
    d = Path(out_root) / Path(scenario_path).stem / command
    d.mkdir(parents=True, exist_ok=True)
    return d


def _guard(path: Path, force: bool) -> None:
    if path.exists() and not force:
        print(f"error: {path} exists (use --force to overwrite)", file=sys.stderr)
        raise SystemExit(1)


def _apply_overrides(s: Scenario, args) -> Scenario:
    changes = {}
    if args.dt is not None:
        changes["dt"] = args.dt
    if getattr(args, "t_end", None) is not None:
        changes["t_end"] = args.t_end
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return dataclasses.replace(s, **changes) if changes else s


def cmd_validate(args) -> int:
    s = _load(args.scenario)
    violations = validate_scenario(s)
    for v in violations:
        print(v)
    if violations:
        return 1
    print("scenario valid")
    return 0


def cmd_simulate(args) -> int:
    s = _apply_overrides(_load(args.scenario), args)
    violations = validate_scenario(s)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 1
    out = _outdir(args.scenario, "simulate", args.out)
    trace_path = out / "trace.csv"
    summary_path = out / "summary.json"
    _guard(trace_path, args.force)
    _guard(summary_path, args.force)
    trace, summary = run(s, check=False)
    trace.to_csv(trace_path)
    summary.to_json(summary_path)
    print(f"wrote {trace_path} and {summary_path}")
    if summary.status == STATUS_SAFETY_VIOLATION:
        for v in summary.violations:
            print(v, file=sys.stderr)
        return 2
    if summary.status == STATUS_INCOMPLETE:
        print("warning: horizon ended before all vehicles exited", file=sys.stderr)
        return 3
    return 0


def cmd_schedule(args) -> int:
    s = _load(args.scenario)
    if s.tau_mode != "im":
        print("error: schedule requires a scenario in im mode", file=sys.stderr)
        return 1
    violations = validate_scenario(s)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 1
    A = s.A if args.A is None else args.A
    rep = schedule([v.x for v in s.vehicles], [v.v for v in s.vehicles], A, s.road)
    out = _outdir(args.scenario, "schedule", args.out)
    path = out / "schedule.json"
    _guard(path, args.force)
    path.write_text(json.dumps(rep.to_dict(), indent=2) + "\n")
    print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    s = _load(args.scenario)
    if s.tau_mode != "im":
        print("error: sweep requires a scenario in im mode", file=sys.stderr)
        return 1
    violations = validate_scenario(s)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 1
    s = _apply_overrides(s, args)
    grid = [float(a) for a in args.A_grid.split(",")]
    if any(not 0.0 <= a <= 1.0 for a in grid):
        print("error: sweep grid values must lie in [0, 1]", file=sys.stderr)
        return 1
    out = _outdir(args.scenario, "sweep", args.out)
    path = out / "sweep.csv"
    _guard(path, args.force)
    rows = []
    for A in grid:
        row = {"A": A}
        try:
            sc = dataclasses.replace(s, A=A)
            trace, summary = run(sc, check=False)
            row.update(
                tau1=summary.taus[0],
                tau_occ=summary.tau_occ,
                time_cost=summary.time_cost,
                fuel=summary.fuel_total,
                status=summary.status,
                error="",
            )
        except Exception as exc:  # keep sweeping past single-run failures
            row.update(tau1=None, tau_occ=None, time_cost=None, fuel=None,
                       status=None, error=str(exc))
        rows.append(row)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(
            fh,
            fieldnames=["A", "tau1", "tau_occ", "time_cost", "fuel", "status", "error"],
        )
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {path}")
    return 0


def cmd_tiat(args) -> int:
    road = RoadParams()
    if args.scenario:
        road = _load(args.scenario).road
    print(f"T_nom      = {t_nom(road):.6f} s")
    print(f"v_under    = {v_underline(road):.6f} m/s")
    print(f"T_iat      = {t_iat_analytic(road):.6f} s (closed form)")
    print(f"T_iat_num  = {t_iat_numeric(road):.6f} s (search)")
    print(f"T_iat_alt  = {max(road.sigma0 * t_nom(road), t_fol_plus_sign(v_underline(road), road)):.6f} s"
          " (diagnostic plus-sign variant, not used)")
    print(f"occ_bound  = {occupancy_bound(args.N, road):.6f} s (N={args.N})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vehstring",
                                description="Vehicle-string approach control toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, t_end=True, seed=True):
        sp.add_argument("--dt", type=float, default=None)
        if t_end:
            sp.add_argument("--t-end", dest="t_end", type=float, default=None)
        if seed:
            sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default="out")
        sp.add_argument("--force", action="store_true")

    sp = sub.add_parser("validate", help="check scenario invariants")
    sp.add_argument("scenario")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("simulate", help="run a scenario, emit trace and summary")
    sp.add_argument("scenario")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("schedule", help="emit the prescribed approach schedule")
    sp.add_argument("scenario")
    sp.add_argument("--A", type=float, default=None)
    sp.add_argument("--out", default="out")
    sp.add_argument("--force", action="store_true")
    sp.set_defaults(func=cmd_schedule)

    sp = sub.add_parser("sweep", help="schedule + simulate over an aggressiveness grid")
    sp.add_argument("scenario")
    sp.add_argument("--A-grid", dest="A_grid", default="0,0.25,0.5,0.75,1")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("tiat", help="print spacing constants and occupancy bound")
    sp.add_argument("scenario", nargs="?", default=None)
    sp.add_argument("--N", type=int, default=8)
    sp.set_defaults(func=cmd_tiat)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
