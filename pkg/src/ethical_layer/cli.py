"""Command line entry point: ``ethical-layer run|sweep|presets``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .plot import PlotError, plot
from .runner import RunIOError, run, sweep
from .world import PRESET_NAMES, ScenarioError, dump_scenario, load_scenario, preset, scenario_to_dict

OUT_ENV = "ETHICAL_LAYER_OUT"
DEFAULT_OUT = "runs"


def _out_root(flag: str | None) -> Path:
    return Path(flag or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _cmd_run(args: argparse.Namespace) -> int:
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
        scenario = load_scenario(text)
    else:
        scenario = preset(args.preset)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    out = _out_root(args.out) / f"{scenario.name}-seed{scenario.seed}"
    result = run(scenario, out)
    if args.plot:
        plot(result.trace_path, result.report_path, out / "plot.svg", scenario_to_dict(scenario))
    print(json.dumps({"scenario": result.scenario_id, "seed": result.seed, "out": str(out),
                      "humans_saved": result.summary["humans_saved"]}))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    result = sweep(args.preset, range(args.seeds), _out_root(args.out))
    print(json.dumps(result.to_dict()))
    return 0


def _cmd_presets(args: argparse.Namespace) -> int:
    if args.action == "list":
        print("\n".join(PRESET_NAMES))
    else:
        if not args.name:
            raise ScenarioError("presets dump needs a preset name")
        sys.stdout.write(dump_scenario(preset(args.name)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ethical-layer", description="Governed-robot scenario simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario and write trace/report")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESET_NAMES)
    src.add_argument("--config", help="scenario JSON file")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default=None, help=f"output root (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    r.add_argument("--plot", action="store_true", help="also write plot.svg")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("sweep", help="multi-seed sweep of a two-human preset")
    s.add_argument("--preset", required=True, choices=PRESET_NAMES)
    s.add_argument("--seeds", type=int, required=True, help="number of seeds (0..N-1)")
    s.add_argument("--out", default=None)
    s.set_defaults(func=_cmd_sweep)

    ps = sub.add_parser("presets", help="list or dump built-in presets")
    ps.add_argument("action", choices=("list", "dump"))
    ps.add_argument("name", nargs="?")
    ps.set_defaults(func=_cmd_presets)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, RunIOError, PlotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
