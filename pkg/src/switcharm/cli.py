"""Command-line entry point.

Exit codes: 0 success / all assertions pass, 1 assertion or invariant
failure, 2 usage, parse or config error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .config import ConfigError, SimConfig, load_config, resolve_motor_spec
from .engine import run_simulation
from .fuzz import run_fuzz
from .motor_model import RPM_TO_RAD_S, anchor_residuals, fit_motor
from .scenario import ScenarioError, evaluate_assertions, parse_scenario
from .trace import serialize_trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switcharm",
        description="Co-simulate the switch-controlled prosthetic arm controller and plant.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario, write the trace, check assertions")
    run.add_argument("--scenario", required=True, type=Path)
    run.add_argument("--config", type=Path)
    run.add_argument("--out", type=Path, help="write the trace CSV here")
    run.add_argument("--stride", type=int, default=1, help="record every n-th tick")

    check = sub.add_parser("check", help="simulate a scenario and print the assertion report")
    check.add_argument("--scenario", required=True, type=Path)
    check.add_argument("--config", type=Path)

    fit = sub.add_parser("fit-motor", help="fit a motor spec and print anchor residuals")
    fit.add_argument("--spec", required=True, help="gripper-1271, elbow-80838.5 or a spec file")

    fuzz = sub.add_parser("fuzz", help="random-drive controller and plant, check safety invariants")
    fuzz.add_argument("--ticks", required=True, type=int)
    fuzz.add_argument("--seed", required=True, type=int)
    fuzz.add_argument("--config", type=Path)
    return parser


def _load(args) -> tuple:
    config = load_config(args.config) if args.config else SimConfig()
    try:
        text = args.scenario.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {args.scenario}: {exc}") from exc
    return parse_scenario(text), config


def _simulate(args, stride: int = 1):
    scenario, config = _load(args)
    trace = run_simulation(scenario, config, stride=stride)
    return trace, evaluate_assertions(trace, scenario)


def cmd_run(args) -> int:
    trace, report = _simulate(args, args.stride)
    if args.out:
        args.out.write_text(serialize_trace(trace))
    print(report.format())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check(args) -> int:
    _, report = _simulate(args)
    print(report.format())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_fit_motor(args) -> int:
    spec = resolve_motor_spec(args.spec)
    params = fit_motor(spec)
    speed_res, current_res = anchor_residuals(spec, params)
    print(f"no_load_speed     = {params.no_load_speed:.6f} rad/s ({params.no_load_speed / RPM_TO_RAD_S:.3f} rpm)")
    print(f"stall_torque      = {params.stall_torque:.6g} N*m")
    print(f"torque_per_ampere = {params.torque_per_ampere:.6g} N*m/A")
    print(f"stall_current     = {params.stall_current:.6g} A")
    print(f"rated-speed residual   = {speed_res:.3e}")
    print(f"rated-current residual = {current_res:.3e}")
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if args.ticks < 0:
        raise ConfigError("--ticks must be >= 0")
    config = load_config(args.config) if args.config else SimConfig()
    start = time.perf_counter()
    result = run_fuzz(args.ticks, args.seed, config)
    elapsed = time.perf_counter() - start
    if result.ok:
        print(f"seed {args.seed}: {result.ticks} ticks, all safety invariants held "
              f"({result.grip_toggles} grip transitions, {elapsed:.2f} s)")
        return EXIT_OK
    print(f"seed {args.seed}: first violation at {result.violation}")
    return EXIT_FAIL


COMMANDS = {"run": cmd_run, "check": cmd_check, "fit-motor": cmd_fit_motor, "fuzz": cmd_fuzz}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ScenarioError as exc:
        for diag in exc.diagnostics:
            print(f"{args.scenario}:{diag}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
