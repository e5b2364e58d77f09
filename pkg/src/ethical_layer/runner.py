"""Run loop, trace/report persistence, run summaries and multi-seed sweeps."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .governor import CycleResult, apply_command, governor_cycle, initial_governor_state
from .kinematics import OBSERVATION_WINDOW_S, WorldState, initial_state, set_goal, step
from .world import MULTI_HUMAN_PRESETS, Scenario, ScenarioError, Vec2, preset

TRACE_COLUMNS = ("tick", "t_s", "agent_id", "x_m", "y_m", "heading_x", "heading_y",
                 "goal_x", "goal_y", "halted")
TRACE_FILE = "trace.csv"
REPORT_FILE = "report.jsonl"
SUMMARY_FILE = "summary.json"


class RunIOError(OSError):
    pass


def _g(v: float) -> str:
    return f"{v:.9g}"


def _xy(v: Optional[Vec2]) -> Optional[list[float]]:
    return None if v is None else [v.x, v.y]


def trace_rows(world: WorldState, scenario: Scenario) -> list[list[str]]:
    t = world.tick / scenario.params.tick_hz
    rows = []
    for a in world.agents:
        goal = ("", "") if a.current_goal is None else (_g(a.current_goal.x), _g(a.current_goal.y))
        rows.append([str(world.tick), _g(t), a.id, _g(a.position.x), _g(a.position.y),
                     _g(a.heading.x), _g(a.heading.y), goal[0], goal[1], "1" if a.halted else "0"])
    return rows


def report_entry(result: CycleResult, t: float) -> dict:
    record = result.record
    decision = record.decision
    override = result.state.active_override
    return {
        "cycle": record.cycle,
        "t": t,
        "intents": [
            {
                "agent_id": i.agent_id,
                "inferred_goal": i.inferred_goal,
                "predicted_path": [_xy(p) for p in i.predicted_path],
                "moving": i.moving,
                "observed_speed": i.observed_speed,
            }
            for i in result.intents
        ],
        "alternatives": [
            {"index": a.index, "target": _xy(a.target), "provenance": a.provenance}
            for a in result.alternatives
        ],
        "outcomes": [
            {
                "alternative": o.alternative,
                "final_positions": {k: _xy(v) for k, v in o.final_positions.items()},
                "stop_causes": dict(o.stop_causes),
            }
            for o in result.outcomes
        ],
        "q_table": [
            {"index": r.index, "q_e": r.q_e, "q_h_each": dict(r.q_h_each), "q_h": r.q_h, "q_t": r.q_t}
            for r in record.rows
        ],
        "delta_q": record.delta_q,
        "decision": ({"action": "no-action"} if decision.enforce is None
                     else {"action": "enforce", "index": decision.enforce}),
        "override_state": (None if override is None
                           else {"target": _xy(override.target), "provenance": override.provenance}),
        "goal_change": (None if result.goal_change is None
                        else {"target": _xy(result.goal_change.target)}),
    }


@dataclass
class Simulation:
    scenario: Scenario
    rows: list[list[str]]
    reports: list[dict]
    final: WorldState

    def trace_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        writer.writerows(self.rows)
        return buf.getvalue()

    def report_text(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.reports)


def simulate(scenario: Scenario) -> Simulation:
    """Interleave engine ticks with a governor cycle every governor period."""
    robot_id = scenario.robot.id
    period = scenario.params.governor_period_ticks
    gstate = apply_command(initial_governor_state(scenario), scenario)
    world = initial_state(scenario, goals={robot_id: gstate.base_goal})
    window = math.ceil(OBSERVATION_WINDOW_S * scenario.params.tick_hz) + 1
    history: deque[WorldState] = deque([world], maxlen=window)
    rows = trace_rows(world, scenario)
    reports = []
    for _ in range(scenario.n_ticks):
        world = step(world, scenario)
        history.append(world)
        if world.tick % period == 0:
            result = governor_cycle(history, gstate, scenario)
            gstate = result.state
            if result.goal_change is not None:
                world = set_goal(world, robot_id, result.goal_change.target)
                history[-1] = world
            reports.append(report_entry(result, world.time))
        rows.extend(trace_rows(world, scenario))
    return Simulation(scenario, rows, reports, world)


# --------------------------------------------------------------------------
# Summaries


def read_trace(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
        raise ValueError(f"malformed trace: expected columns {','.join(TRACE_COLUMNS)}")
    out = []
    for n, row in enumerate(reader, start=2):
        try:
            out.append({
                "tick": int(row["tick"]),
                "t": float(row["t_s"]),
                "agent_id": row["agent_id"],
                "pos": Vec2(float(row["x_m"]), float(row["y_m"])),
                "goal": None if row["goal_x"] == "" else Vec2(float(row["goal_x"]), float(row["goal_y"])),
                "halted": row["halted"] == "1",
            })
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed trace at line {n}: {exc}") from exc
    return out


def summarize(trace: Sequence[dict], scenario: Scenario) -> dict:
    """Per-run metrics derived from the trace alone (plus the scenario's static geometry).

    A human counts as saved when it never came within the proximity radius
    of a dangerous site and its final, latched halt began next to the robot.
    """
    r = scenario.params.proximity_radius
    robot_id = scenario.robot.id
    by_tick: dict[int, dict[str, dict]] = {}
    for row in trace:
        by_tick.setdefault(row["tick"], {})[row["agent_id"]] = row
    if not by_tick:
        raise ValueError("empty trace")
    ticks = sorted(by_tick)
    last = by_tick[ticks[-1]]
    danger = scenario.dangerous_sites

    agents = {}
    for spec in scenario.agents:
        final = last[spec.id]["pos"]
        min_danger = None
        if danger:
            min_danger = min(by_tick[t][spec.id]["pos"].dist(s.position) for t in ticks for s in danger)
        agents[spec.id] = {
            "final_position": [final.x, final.y],
            "final_distance_to_goal": {g.id: final.dist(g.position) for g in scenario.goals},
            "min_distance_to_danger": min_danger,
            "final_halted": last[spec.id]["halted"],
        }

    saved = []
    for h in scenario.humans:
        info = agents[h.id]
        if info["min_distance_to_danger"] is None or info["min_distance_to_danger"] <= r:
            continue
        if not info["final_halted"]:
            continue
        onset = ticks[-1]
        for t in reversed(ticks):
            if not by_tick[t][h.id]["halted"]:
                break
            onset = t
        row = by_tick[onset]
        if row[h.id]["pos"].dist(row[robot_id]["pos"]) < r:
            saved.append(h.id)
    return {"agents": agents, "humans_saved": saved}


@dataclass
class RunResult:
    scenario_id: str
    seed: int
    trace_path: Path
    report_path: Path
    summary: dict


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise RunIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def run(scenario: Scenario, out_dir: Path | str) -> RunResult:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RunIOError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    sim = simulate(scenario)
    trace_text = sim.trace_text()
    trace_path, report_path = out / TRACE_FILE, out / REPORT_FILE
    _write(trace_path, trace_text)
    _write(report_path, sim.report_text())
    summary = summarize(read_trace(trace_text), scenario)
    _write(out / SUMMARY_FILE, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return RunResult(scenario.name, scenario.seed, trace_path, report_path, summary)


# --------------------------------------------------------------------------
# Sweeps


@dataclass
class SweepResult:
    preset_id: str
    seeds: list[int]
    saved: list[str] = field(default_factory=list)
    tally: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"preset": self.preset_id, "seeds": self.seeds, "saved": self.saved, "tally": self.tally}


def saved_label(summary: dict) -> str:
    return "+".join(sorted(summary["humans_saved"])) or "none"


def sweep(preset_id: str, seeds: Iterable[int], out_dir: Path | str | None = None) -> SweepResult:
    """Run a multi-human preset once per seed and tally which human was saved."""
    if preset_id not in MULTI_HUMAN_PRESETS:
        raise ScenarioError(f"sweep needs a multi-human preset ({', '.join(MULTI_HUMAN_PRESETS)}), "
                            f"got {preset_id!r}")
    base = preset(preset_id)
    seeds = list(seeds)
    result = SweepResult(preset_id, seeds)
    counts: Counter[str] = Counter({h.id: 0 for h in base.humans})
    for seed in seeds:
        scenario = base.with_seed(seed)
        if out_dir is None:
            sim = simulate(scenario)
            summary = summarize(read_trace(sim.trace_text()), scenario)
        else:
            summary = run(scenario, Path(out_dir) / f"{preset_id}-seed{seed}").summary
        label = saved_label(summary)
        result.saved.append(label)
        counts[label] += 1
    result.tally = dict(sorted(counts.items()))
    if out_dir is not None:
        _write(Path(out_dir) / f"{preset_id}-sweep.json",
               json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
    return result
