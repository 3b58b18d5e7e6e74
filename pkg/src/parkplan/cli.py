"""Command line entry points.

Subcommands:
  plan    plan one slot with one engine, optionally writing CSV and SVG
  sweep   run both engines over every slot and summarize improvements
  render  plan one slot and write the annotated SVG snapshot
  map     dump the generated occupancy map in the text map format
"""

from __future__ import annotations

import argparse
import sys

from .bench import run_scenario, run_sweep
from .config import ConfigError, load_config
from .world import build_parking_layout, save_map


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="parkplan",
        description="Parking lot motion planning benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="plan a single slot")
    plan.add_argument("--config", required=True)
    plan.add_argument("--slot", required=True, type=int)
    plan.add_argument("--engine", required=True, choices=("hybrid", "smha"))
    plan.add_argument("--svg", default=None)
    plan.add_argument("--csv", default=None)

    sweep = sub.add_parser("sweep", help="benchmark every slot")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--jobs", type=int, default=1)

    render = sub.add_parser("render", help="plan one slot and render it")
    render.add_argument("--config", required=True)
    render.add_argument("--slot", required=True, type=int)
    render.add_argument("--engine", required=True, choices=("hybrid", "smha"))
    render.add_argument("--out", required=True)

    dump = sub.add_parser("map", help="write the occupancy map file")
    dump.add_argument("--config", required=True)
    dump.add_argument("--out", required=True)
    return parser


def _cmd_map(args) -> int:
    try:
        scenario = load_config(args.config)
        layout = build_parking_layout(scenario.layout, scenario.vehicle)
    except (ConfigError, ValueError) as exc:
        print("config error: {}".format(exc), file=sys.stderr)
        return 2
    try:
        save_map(layout.grid, layout.slots, args.out)
    except OSError as exc:
        print("artifact error: {}".format(exc), file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "plan":
        return run_scenario(args.config, args.slot, args.engine,
                            svg_path=args.svg, csv_path=args.csv)
    if args.command == "sweep":
        return run_sweep(args.config, out_dir=args.out, jobs=args.jobs)
    if args.command == "render":
        return run_scenario(args.config, args.slot, args.engine,
                            svg_path=args.out)
    return _cmd_map(args)


if __name__ == "__main__":
    sys.exit(main())
