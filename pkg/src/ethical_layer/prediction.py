"""Low-fidelity consequence prediction: ballistic straight-line extrapolation.

Every modelled agent walks at constant speed toward its destination and stops
there. Two agents whose separation drops below the proximity radius both
stop. Motion between stop events is linear, so the stop times are solved for
exactly instead of integrated tick by tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .generation import Alternative
from .human_model import InferredIntent
from .kinematics import WorldState
from .world import GoalSite, Scenario, Vec2

HORIZON_S = 120.0
_EPS_T = 1e-12

REACHED = "reached-goal"
PROXIMITY = "proximity-stop"
HORIZON = "horizon"
STATIONARY = "stationary"


@dataclass(frozen=True)
class PredictedOutcome:
    alternative: int
    final_positions: dict[str, Vec2]
    stop_causes: dict[str, str]


@dataclass
class _Body:
    id: str
    pos: Vec2
    dest: Optional[Vec2]
    speed: float
    moving: bool = True
    cause: Optional[str] = None

    @property
    def velocity(self) -> Vec2:
        if not self.moving:
            return Vec2(0.0, 0.0)
        return (self.dest - self.pos).unit() * self.speed


def _pair_contact_time(a: _Body, b: _Body, r: float) -> Optional[float]:
    """First time >= 0 at which the pair is closer than ``r`` while not separating."""
    dp = b.pos - a.pos
    dv = b.velocity - a.velocity
    c = dp.dot(dp) - r * r
    bq = 2.0 * dp.dot(dv)
    if c < 0.0:
        return 0.0 if bq <= 0.0 else None
    aq = dv.dot(dv)
    if aq == 0.0 or bq >= 0.0:
        return None
    disc = bq * bq - 4.0 * aq * c
    if disc < 0.0:
        return None
    # Citardauq form of the smaller root; stable when c is tiny.
    return (2.0 * c) / (-bq + math.sqrt(disc))


def simulate_bodies(bodies: list[_Body], r: float, horizon: float = HORIZON_S) -> None:
    """Run the event loop in place until every body has stopped or time runs out."""
    for body in bodies:
        if body.dest is None or body.speed <= 0.0:
            body.moving, body.cause = False, STATIONARY
        elif body.pos.dist(body.dest) == 0.0:
            body.moving, body.cause = False, REACHED

    now = 0.0
    while any(b.moving for b in bodies):
        events: list[tuple[float, str, tuple[int, ...]]] = []
        for i, b in enumerate(bodies):
            if b.moving:
                events.append((b.pos.dist(b.dest) / b.speed, REACHED, (i,)))
        for i in range(len(bodies)):
            for j in range(i + 1, len(bodies)):
                if not (bodies[i].moving or bodies[j].moving):
                    continue
                t = _pair_contact_time(bodies[i], bodies[j], r)
                if t is not None:
                    events.append((t, PROXIMITY, (i, j)))
        t_next = min(e[0] for e in events)
        if now + t_next >= horizon:
            t_left = horizon - now
            for b in bodies:
                if b.moving:
                    b.pos = b.pos + b.velocity * t_left
                    b.moving, b.cause = False, HORIZON
            break

        velocities = [b.velocity for b in bodies]
        for b, v in zip(bodies, velocities):
            if b.moving:
                b.pos = b.pos + v * t_next
        now += t_next

        for t, kind, members in events:
            if t > t_next + _EPS_T:
                continue
            if kind == REACHED:
                b = bodies[members[0]]
                if b.moving:
                    b.pos, b.moving, b.cause = b.dest, False, REACHED
            else:
                for k in members:
                    if bodies[k].moving:
                        bodies[k].moving, bodies[k].cause = False, PROXIMITY


def predict(world: WorldState, alternative: Alternative, intents: Sequence[InferredIntent],
            scenario: Scenario) -> PredictedOutcome:
    robot = scenario.robot
    bodies = [_Body(robot.id, world.agent(robot.id).position, alternative.target, robot.nominal_speed)]
    for intent in intents:
        if intent.moving:
            bodies.append(_Body(intent.agent_id, intent.position, intent.predicted_path[1],
                                intent.observed_speed))
        else:
            bodies.append(_Body(intent.agent_id, intent.position, None, 0.0))
    simulate_bodies(bodies, scenario.params.proximity_radius)
    return PredictedOutcome(
        alternative=alternative.index,
        final_positions={b.id: b.pos for b in bodies},
        stop_causes={b.id: b.cause for b in bodies},
    )


def final_distance(outcome: PredictedOutcome, agent_id: str, site: GoalSite) -> float:
    if agent_id not in outcome.final_positions:
        raise KeyError(f"unknown agent id {agent_id!r}")
    return outcome.final_positions[agent_id].dist(site.position)
