"""The governor's model of each human: goal from gaze, straight-line path.

Only observable state is used (pose and position history). The simulated
human's own goal is never consulted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .kinematics import WorldState, observed_speed
from .world import HUMAN, GoalSite, Pose, Scenario, Vec2


@dataclass(frozen=True)
class InferredIntent:
    agent_id: str
    inferred_goal: str
    predicted_path: tuple[Vec2, Vec2]
    moving: bool
    observed_speed: float

    @property
    def position(self) -> Vec2:
        return self.predicted_path[0]


def _angle_between(u: Vec2, v: Vec2) -> float:
    return abs(math.atan2(u.x * v.y - u.y * v.x, u.dot(v)))


def infer_goal(pose: Pose, goals: Sequence[GoalSite]) -> str:
    """Goal whose bearing is closest to the gaze direction; ties go to the first goal."""
    for g in goals:
        if g.position == pose.position:
            return g.id
    angles = [_angle_between(pose.heading, g.position - pose.position) for g in goals]
    best = 0
    for i, a in enumerate(angles):
        if a < angles[best]:
            best = i
    return goals[best].id


def build_intent(history: Sequence[WorldState], agent_id: str, scenario: Scenario) -> InferredIntent:
    try:
        spec = scenario.agent(agent_id)
    except KeyError:
        raise KeyError(f"unknown agent id {agent_id!r}") from None
    if spec.role != HUMAN:
        raise ValueError(f"agent {agent_id!r} is not a human")
    current = history[-1].agent(agent_id)
    pose = Pose(current.position, current.heading)
    goal_id = infer_goal(pose, scenario.goals)
    speed = observed_speed(history, agent_id)
    return InferredIntent(
        agent_id=agent_id,
        inferred_goal=goal_id,
        predicted_path=(current.position, scenario.goal(goal_id).position),
        moving=speed >= scenario.params.motion_threshold,
        observed_speed=speed,
    )


def build_intents(history: Sequence[WorldState], scenario: Scenario) -> list[InferredIntent]:
    return [build_intent(history, h.id, scenario) for h in scenario.humans]
