"""Arena geometry, goal sites, agents and the scenario description.

Scenarios are immutable once loaded. ``load_scenario`` / ``dump_scenario``
round-trip the JSON file format; ``preset`` returns the built-in experiments.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional

SCHEMA_VERSION = 1

HUMAN = "human"
ROBOT = "ethical-robot"
ROLES = (HUMAN, ROBOT)


class ScenarioError(ValueError):
    """Raised when a scenario config fails validation."""


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def unit(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalise a zero vector")
        return Vec2(self.x / n, self.y / n)

    def as_list(self) -> list[float]:
        return [self.x, self.y]


@dataclass(frozen=True)
class Pose:
    position: Vec2
    heading: Vec2

    def __post_init__(self) -> None:
        if abs(self.heading.norm() - 1.0) > 1e-9:
            raise ValueError(f"heading must be a unit vector, got {self.heading}")


@dataclass(frozen=True)
class GoalSite:
    id: str
    position: Vec2
    dangerous: bool = False


@dataclass(frozen=True)
class AgentSpec:
    id: str
    role: str
    start: Pose
    base_goal: Optional[str]
    nominal_speed: float
    speed_noise_sigma: float = 0.0

    @property
    def is_human(self) -> bool:
        return self.role == HUMAN


@dataclass(frozen=True)
class Params:
    proximity_radius: float = 0.5
    motion_threshold: float = 0.05
    beta: float = 10.0
    t_shift: float = 0.25
    danger_threshold: float = 0.75
    enforce_threshold: float = 0.2
    tick_hz: float = 30.0
    governor_period_ticks: int = 30


@dataclass(frozen=True)
class Scenario:
    name: str
    width: float
    height: float
    goals: tuple[GoalSite, GoalSite]
    agents: tuple[AgentSpec, ...]
    command: Optional[str] = None
    params: Params = field(default_factory=Params)
    duration: float = 180.0
    seed: int = 0

    # Convenience views; the dataclass itself stays a plain value.
    def goal(self, goal_id: str) -> GoalSite:
        for g in self.goals:
            if g.id == goal_id:
                return g
        raise KeyError(goal_id)

    def agent(self, agent_id: str) -> AgentSpec:
        for a in self.agents:
            if a.id == agent_id:
                return a
        raise KeyError(agent_id)

    @property
    def robot(self) -> AgentSpec:
        return next(a for a in self.agents if a.role == ROBOT)

    @property
    def humans(self) -> tuple[AgentSpec, ...]:
        return tuple(a for a in self.agents if a.role == HUMAN)

    @property
    def dangerous_sites(self) -> tuple[GoalSite, ...]:
        return tuple(g for g in self.goals if g.dangerous)

    @property
    def dt(self) -> float:
        return 1.0 / self.params.tick_hz

    @property
    def n_ticks(self) -> int:
        return int(math.floor(self.duration * self.params.tick_hz + 1e-9))

    def inside(self, p: Vec2) -> bool:
        return 0.0 <= p.x <= self.width and 0.0 <= p.y <= self.height

    def with_seed(self, seed: int) -> Scenario:
        return replace(self, seed=seed)


# --------------------------------------------------------------------------
# JSON (de)serialisation


def _vec(raw: Any, where: str) -> Vec2:
    if (
        not isinstance(raw, (list, tuple))
        or len(raw) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)
    ):
        raise ScenarioError(f"{where}: expected [x, y] pair of numbers, got {raw!r}")
    x, y = float(raw[0]), float(raw[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ScenarioError(f"{where}: components must be finite")
    return Vec2(x, y)


def _number(raw: dict, key: str, where: str, default: Any = None) -> float:
    if key not in raw:
        if default is None:
            raise ScenarioError(f"{where}.{key}: required field missing")
        return default
    v = raw[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise ScenarioError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


def scenario_from_dict(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario: top level must be an object")
    if "schema_version" not in raw:
        raise ScenarioError("schema_version: required field missing")
    if raw["schema_version"] != SCHEMA_VERSION:
        raise ScenarioError(
            f"schema_version: unsupported version {raw['schema_version']!r} (expected {SCHEMA_VERSION})"
        )

    arena = raw.get("arena")
    if not isinstance(arena, dict):
        raise ScenarioError("arena: required object missing")
    width = _number(arena, "width", "arena")
    height = _number(arena, "height", "arena")
    if width <= 0 or height <= 0:
        raise ScenarioError("arena: width and height must be positive")

    goals_raw = raw.get("goals")
    if not isinstance(goals_raw, list) or len(goals_raw) != 2:
        raise ScenarioError("goals: exactly two goal sites required")
    goals = []
    for i, g in enumerate(goals_raw):
        where = f"goals[{i}]"
        if not isinstance(g, dict) or not isinstance(g.get("id"), str):
            raise ScenarioError(f"{where}.id: string id required")
        dangerous = g.get("dangerous", False)
        if not isinstance(dangerous, bool):
            raise ScenarioError(f"{where}.dangerous: expected boolean")
        goals.append(GoalSite(g["id"], _vec(g.get("position"), f"{where}.position"), dangerous))
    if goals[0].id == goals[1].id:
        raise ScenarioError(f"goals: duplicate goal id {goals[0].id!r}")
    goal_ids = {g.id for g in goals}

    agents_raw = raw.get("agents")
    if not isinstance(agents_raw, list) or not agents_raw:
        raise ScenarioError("agents: non-empty list required")
    agents = []
    for i, a in enumerate(agents_raw):
        where = f"agents[{i}]"
        if not isinstance(a, dict) or not isinstance(a.get("id"), str):
            raise ScenarioError(f"{where}.id: string id required")
        role = a.get("role")
        if role not in ROLES:
            raise ScenarioError(f"{where}.role: must be one of {ROLES}, got {role!r}")
        start = a.get("start")
        if not isinstance(start, dict):
            raise ScenarioError(f"{where}.start: object with position and heading required")
        heading = _vec(start.get("heading", [1.0, 0.0]), f"{where}.start.heading")
        if heading.norm() == 0.0:
            raise ScenarioError(f"{where}.start.heading: must be non-zero")
        pose = Pose(_vec(start.get("position"), f"{where}.start.position"), heading.unit())
        base_goal = a.get("base_goal")
        if base_goal is not None and base_goal not in goal_ids:
            raise ScenarioError(f"{where}.base_goal: unknown goal id {base_goal!r}")
        speed = _number(a, "nominal_speed", where)
        if speed <= 0:
            raise ScenarioError(f"{where}.nominal_speed: must be > 0")
        sigma = _number(a, "speed_noise_sigma", where, 0.0)
        if sigma < 0:
            raise ScenarioError(f"{where}.speed_noise_sigma: must be >= 0")
        agents.append(AgentSpec(a["id"], role, pose, base_goal, speed, sigma))

    ids = [a.id for a in agents]
    if len(set(ids)) != len(ids):
        raise ScenarioError("agents: duplicate agent ids")
    n_robots = sum(a.role == ROBOT for a in agents)
    if n_robots != 1:
        raise ScenarioError(f"agents: exactly one {ROBOT} required, found {n_robots}")
    if not any(a.role == HUMAN for a in agents):
        raise ScenarioError("agents: at least one human required")

    command = raw.get("command")
    if command is not None and command not in goal_ids:
        raise ScenarioError(f"command: unknown goal id {command!r}")

    p_raw = raw.get("params", {})
    if not isinstance(p_raw, dict):
        raise ScenarioError("params: expected an object")
    defaults = Params()
    known = set(Params.__dataclass_fields__)
    for key in p_raw:
        if key not in known:
            raise ScenarioError(f"params.{key}: unknown parameter")
    values = {k: _number(p_raw, k, "params", getattr(defaults, k)) for k in known}
    for k, v in values.items():
        if v <= 0:
            raise ScenarioError(f"params.{k}: must be positive")
    period = values["governor_period_ticks"]
    if period != int(period) or period < 1:
        raise ScenarioError("params.governor_period_ticks: must be an integer >= 1")
    values["governor_period_ticks"] = int(period)
    params = Params(**values)

    duration = _number(raw, "duration_s", "scenario", 180.0)
    if duration < 0:
        raise ScenarioError("duration_s: must be >= 0")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ScenarioError("seed: non-negative integer required")
    name = raw.get("name", "custom")
    if not isinstance(name, str):
        raise ScenarioError("name: expected a string")

    scenario = Scenario(
        name=name,
        width=width,
        height=height,
        goals=(goals[0], goals[1]),
        agents=tuple(agents),
        command=command,
        params=params,
        duration=duration,
        seed=seed,
    )
    for g in scenario.goals:
        if not scenario.inside(g.position):
            raise ScenarioError(f"goals.{g.id}.position: {g.position.as_list()} outside arena")
    for a in scenario.agents:
        if not scenario.inside(a.start.position):
            raise ScenarioError(f"agents.{a.id}.start.position: {a.start.position.as_list()} outside arena")
    return scenario


def scenario_to_dict(s: Scenario) -> dict:
    p = s.params
    return {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "arena": {"width": s.width, "height": s.height},
        "goals": [
            {"id": g.id, "position": g.position.as_list(), "dangerous": g.dangerous} for g in s.goals
        ],
        "agents": [
            {
                "id": a.id,
                "role": a.role,
                "start": {"position": a.start.position.as_list(), "heading": a.start.heading.as_list()},
                "base_goal": a.base_goal,
                "nominal_speed": a.nominal_speed,
                "speed_noise_sigma": a.speed_noise_sigma,
            }
            for a in s.agents
        ],
        "command": s.command,
        "params": {
            "proximity_radius": p.proximity_radius,
            "motion_threshold": p.motion_threshold,
            "beta": p.beta,
            "t_shift": p.t_shift,
            "danger_threshold": p.danger_threshold,
            "enforce_threshold": p.enforce_threshold,
            "tick_hz": p.tick_hz,
            "governor_period_ticks": p.governor_period_ticks,
        },
        "seed": s.seed,
        "duration_s": s.duration,
    }


def load_scenario(source: str) -> Scenario:
    """Parse and validate a JSON scenario document."""
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario: invalid JSON ({exc})") from exc
    return scenario_from_dict(raw)


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


# --------------------------------------------------------------------------
# Built-in presets
#
# Goal and start coordinates are not published; these are chosen so that both
# goals sit on the far side of a 3.0 x 2.5 arena with the humans starting on
# the same rows as the goals.

ROBOT_SPEED = 0.08
HUMAN_SPEED = 0.03
# The human's walking speed is below the published 0.05 m/s detection
# threshold; presets lower it so a walking human registers as moving.
PRESET_MOTION_THRESHOLD = 0.015
EQUAL_SPEED_NOISE = 0.15
# Shared speed for the equal-speed two-human preset: fast enough that the
# robot can reach at most one of the two humans before they reach danger.
EQUAL_HUMAN_SPEED = 0.06

_ARENA = {"width": 3.0, "height": 2.5}
_POS_A = [2.5, 0.6]
_POS_B = [2.5, 1.9]
_ROBOT_START = [0.4, 1.25]
_HUMAN_A_START = [0.8, 0.6]
_HUMAN_B_START = [0.8, 1.9]


def _robot(base_goal: Optional[str]) -> dict:
    return {
        "id": "robot",
        "role": ROBOT,
        "start": {"position": _ROBOT_START, "heading": [1.0, 0.0]},
        "base_goal": base_goal,
        "nominal_speed": ROBOT_SPEED,
        "speed_noise_sigma": 0.0,
    }


def _human(agent_id: str, start: list, base_goal: Optional[str], speed: float = HUMAN_SPEED,
           sigma: float = 0.0) -> dict:
    return {
        "id": agent_id,
        "role": HUMAN,
        "start": {"position": start, "heading": [1.0, 0.0]},
        "base_goal": base_goal,
        "nominal_speed": speed,
        "speed_noise_sigma": sigma,
    }


def _config(name: str, a_danger: bool, b_danger: bool, agents: list, command: Optional[str]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "arena": dict(_ARENA),
        "goals": [
            {"id": "A", "position": _POS_A, "dangerous": a_danger},
            {"id": "B", "position": _POS_B, "dangerous": b_danger},
        ],
        "agents": agents,
        "command": command,
        "params": {"motion_threshold": PRESET_MOTION_THRESHOLD},
        "seed": 0,
        "duration_s": 180.0,
    }


def _multi(name: str, speed_a: float, speed_b: float, sigma: float) -> dict:
    return _config(
        name, True, True,
        [
            _robot(None),
            _human("human_a", _HUMAN_A_START, "A", speed_a, sigma),
            _human("human_b", _HUMAN_B_START, "B", speed_b, sigma),
        ],
        None,
    )


_PRESETS: dict[str, dict] = {
    "exp1": _config("exp1", False, True, [_robot("B"), _human("human", _HUMAN_A_START, None)], None),
    "exp2": _config("exp2", False, True, [_robot("B"), _human("human", _HUMAN_A_START, None)], "B"),
    "exp3": _config("exp3", True, False, [_robot("B"), _human("human", _HUMAN_A_START, "A")], None),
    "exp4": _config("exp4", True, False, [_robot("B"), _human("human", _HUMAN_A_START, "A")], "B"),
    "exp4-alt": _config("exp4-alt", False, True, [_robot("B"), _human("human", _HUMAN_A_START, "A")], "B"),
    "multi-human-fast-A": _multi("multi-human-fast-A", ROBOT_SPEED, HUMAN_SPEED, 0.0),
    "multi-human-fast-B": _multi("multi-human-fast-B", HUMAN_SPEED, ROBOT_SPEED, 0.0),
    "multi-human-equal": _multi("multi-human-equal", EQUAL_HUMAN_SPEED, EQUAL_HUMAN_SPEED, EQUAL_SPEED_NOISE),
}

PRESET_NAMES = tuple(_PRESETS)
MULTI_HUMAN_PRESETS = ("multi-human-fast-A", "multi-human-fast-B", "multi-human-equal")


def preset_config(name: str) -> dict:
    if name not in _PRESETS:
        raise ScenarioError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return copy.deepcopy(_PRESETS[name])


def preset(name: str) -> Scenario:
    return scenario_from_dict(preset_config(name))
