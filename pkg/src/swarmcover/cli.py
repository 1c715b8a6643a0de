"""Command line entry point: ``swarmcover run | montecarlo | validate``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

from swarmcover._backend import BACKEND
from swarmcover.export import export_csv, render_svg
from swarmcover.harness import monte_carlo, run_scenario
from swarmcover.scenario import BUILTIN, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_SCENARIO = 1
EXIT_COLLISION = 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarmcover", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    scen_help = f"scenario YAML file, or one of: {', '.join(BUILTIN)}"

    run = sub.add_parser("run", help="simulate one scenario")
    run.add_argument("--scenario", required=True, help=scen_help)
    run.add_argument("--out-dir", type=Path, default=Path("."))
    run.add_argument("--csv", action="store_true", help="write trajectory.csv")
    run.add_argument("--svg", action="store_true", help="write trajectory.svg")
    run.add_argument("--no-avoidance", action="store_true", help="disable collision avoidance")

    mc = sub.add_parser("montecarlo", help="seeded campaign of independent runs")
    mc.add_argument("--scenario", required=True, help=scen_help)
    mc.add_argument("--runs", type=int, default=100)
    mc.add_argument("--seed", type=int, default=None, help="master seed (default: the scenario's sim.seed)")
    mc.add_argument("--out-dir", type=Path, default=None)

    val = sub.add_parser("validate", help="check a scenario document")
    val.add_argument("--scenario", required=True, help=scen_help)
    return p


def _cmd_run(args) -> int:
    s = load_scenario(args.scenario)
    if args.no_avoidance:
        s = dataclasses.replace(s, avoidance_enabled=False)
    t0 = time.perf_counter()
    traj = run_scenario(s)
    elapsed = time.perf_counter() - t0
    print(
        f"{s.name or args.scenario}: {traj.status.value} after {traj.iterations} iterations "
        f"({elapsed:.2f} s, {BACKEND} kernels)"
    )
    print(f"min separation {traj.min_separation:.6g}, collision events {len(traj.collisions)}, infeasible solves {traj.infeasible}")
    for k, cost in enumerate(traj.records[-1].costs):
        print(f"swarm {k + 1} coverage cost {cost:.6g}")
    if args.csv or args.svg:
        args.out_dir.mkdir(parents=True, exist_ok=True)
    if args.csv:
        (args.out_dir / "trajectory.csv").write_text(export_csv(traj))
    if args.svg:
        (args.out_dir / "trajectory.svg").write_text(render_svg(traj, s))
    if s.avoidance_enabled and traj.collisions:
        return EXIT_COLLISION
    return EXIT_OK


def _cmd_montecarlo(args) -> int:
    s = load_scenario(args.scenario)
    seed = s.seed if args.seed is None else args.seed
    t0 = time.perf_counter()
    report = monte_carlo(s, args.runs, seed)
    elapsed = time.perf_counter() - t0
    print(
        f"{report.runs} runs ({report.completed_runs} completed) in {elapsed:.1f} s: "
        f"{report.collision_free_runs} collision-free"
    )
    statuses = {st: report.statuses.count(st) for st in sorted(set(report.statuses))}
    print("termination: " + ", ".join(f"{k} {v}" for k, v in statuses.items()))
    done = [m for i, m in enumerate(report.min_separations) if i not in report.failures]
    if done:
        print(f"smallest separation over all runs {min(done):.6g}")
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        (args.out_dir / "campaign.json").write_text(json.dumps(report.as_dict(), indent=2))
    if s.avoidance_enabled and report.collision_free_runs < report.completed_runs:
        return EXIT_COLLISION
    return EXIT_OK


def _cmd_validate(args) -> int:
    s = load_scenario(args.scenario)
    sizes = ", ".join(str(sw.size) for sw in s.swarms)
    print(f"ok: {len(s.swarms)} swarm(s) of {sizes} agents, avoidance {'on' if s.avoidance_enabled else 'off'}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "montecarlo": _cmd_montecarlo, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
