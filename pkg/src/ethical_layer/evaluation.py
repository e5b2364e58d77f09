"""Scoring predicted outcomes against Asimov's priorities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .prediction import PredictedOutcome
from .world import Scenario, Vec2


def sigmoid_q(d: float, beta: float = 10.0, t_shift: float = 0.25) -> float:
    """Safety value of an agent ending ``d`` metres from danger; higher is safer."""
    z = beta * (d - t_shift)
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def combine(q_e: float, q_h: float, command_issued: bool, danger_threshold: float = 0.75) -> float:
    # The robot's own safety only counts when no order was given and the
    # humans are predicted safe.
    if not command_issued and q_h > danger_threshold:
        return q_e + q_h
    return q_h


@dataclass(frozen=True)
class Decision:
    enforce: Optional[int]
    delta_q: float

    @property
    def label(self) -> str:
        return "no-action" if self.enforce is None else f"enforce({self.enforce})"


def decide(q_t: Sequence[float], enforce_threshold: float = 0.2) -> Decision:
    if not q_t:
        raise ValueError("decide needs at least one alternative")
    hi, lo = max(q_t), min(q_t)
    delta = hi - lo
    if delta > enforce_threshold:
        return Decision(q_t.index(hi), delta)
    return Decision(None, delta)


@dataclass(frozen=True)
class AlternativeScore:
    index: int
    q_e: float
    q_h_each: dict[str, float]
    q_h: float
    q_t: float


@dataclass(frozen=True)
class EvaluationRecord:
    cycle: int
    rows: tuple[AlternativeScore, ...]
    delta_q: float
    decision: Decision


def danger_distance(position: Vec2, scenario: Scenario) -> Optional[float]:
    """Distance to the nearest dangerous site, or None when no site is dangerous."""
    sites = scenario.dangerous_sites
    if not sites:
        return None
    return min(position.dist(s.position) for s in sites)


def agent_q(position: Vec2, scenario: Scenario) -> float:
    d = danger_distance(position, scenario)
    if d is None:
        return 1.0
    return sigmoid_q(d, scenario.params.beta, scenario.params.t_shift)


def evaluate_cycle(outcomes: Sequence[PredictedOutcome], scenario: Scenario, command_issued: bool,
                   cycle: int = 0) -> EvaluationRecord:
    if not outcomes:
        raise ValueError("evaluate_cycle needs at least one outcome")
    if [o.alternative for o in outcomes] != list(range(len(outcomes))):
        raise ValueError("outcomes must be indexed 0..n-1 in alternative order")
    p = scenario.params
    robot_id = scenario.robot.id
    rows = []
    for o in outcomes:
        q_e = agent_q(o.final_positions[robot_id], scenario)
        each = {h.id: agent_q(o.final_positions[h.id], scenario) for h in scenario.humans}
        q_h = math.fsum(each.values())
        rows.append(AlternativeScore(o.alternative, q_e, each, q_h,
                                     combine(q_e, q_h, command_issued, p.danger_threshold)))
    decision = decide([r.q_t for r in rows], p.enforce_threshold)
    return EvaluationRecord(cycle, tuple(rows), decision.delta_q, decision)
