"""Command-line interface: run, check, and sweep scenarios."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .metrics import build_report
from .output import write_report, write_timehistory
from .scenario import ScenarioError, load_scenario, parse_scenario
from .simulate import run_simulation

__all__ = ["cli", "main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vtsi",
        description="Vehicle-track-structure interaction simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write outputs")
    p_run.add_argument("scenario", help="scenario JSON file")
    p_run.add_argument("-o", "--out", required=True,
                       help="output directory for timehistory.csv, report.json")

    p_check = sub.add_parser("check", help="validate a scenario file")
    p_check.add_argument("scenario", help="scenario JSON file")

    p_sweep = sub.add_parser("sweep", help="run a scenario over a value sweep")
    p_sweep.add_argument("scenario", help="scenario JSON file")
    p_sweep.add_argument("--param", required=True,
                         help="dotted scenario key, e.g. run.dt")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated values to substitute")
    p_sweep.add_argument("-o", "--out", required=True,
                         help="parent directory; one subdirectory per value")
    return parser


def _run_one(scenario, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    history = run_simulation(scenario)
    write_timehistory(history, out_dir / "timehistory.csv")
    write_report(build_report(history, scenario), out_dir / "report.json")


def _set_dotted(data: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ScenarioError("cannot descend into key %r" % key)
    node[keys[-1]] = value


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def cli(argv=None) -> int:
    """Entry point; returns 0 on success, 1 on validation error, 2 on
    solver failure."""
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "check":
            load_scenario(args.scenario)
            print("scenario OK: %s" % args.scenario)
            return 0
        if args.command == "run":
            scenario = load_scenario(args.scenario)
        else:  # sweep: re-parse per value with the override applied
            with open(args.scenario) as f:
                raw = json.load(f)
            values = [v for v in args.values.split(",") if v]
            if not values:
                raise ScenarioError("sweep needs at least one value")
    except (ScenarioError, OSError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1

    try:
        if args.command == "run":
            _run_one(scenario, Path(args.out))
            return 0
        for text in values:
            data = json.loads(json.dumps(raw))
            try:
                _set_dotted(data, args.param, _coerce(text))
                scenario = parse_scenario(data)
            except ScenarioError as exc:
                print("error: %s" % exc, file=sys.stderr)
                return 1
            _run_one(scenario, Path(args.out) / ("%s=%s" % (args.param, text)))
        return 0
    except RuntimeError as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
