"""Behavioural alternatives for the governed robot: candidate target positions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .human_model import InferredIntent
from .world import Scenario, Vec2

PATH_FRACTIONS = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class Alternative:
    index: int
    target: Vec2
    provenance: str  # "goal-A", "goal-B" or "path-point(<human>,<k>)"

    @property
    def is_path_point(self) -> bool:
        return self.provenance.startswith("path-point")


def generate(intents: Sequence[InferredIntent], scenario: Scenario) -> list[Alternative]:
    """Both goal sites, then three interior points on each moving human's path."""
    targets: list[tuple[Vec2, str]] = [(g.position, f"goal-{g.id}") for g in scenario.goals]
    for intent in intents:
        if not intent.moving:
            continue
        start, end = intent.predicted_path
        for k, f in enumerate(PATH_FRACTIONS, start=1):
            targets.append((start + (end - start) * f, f"path-point({intent.agent_id},{k})"))
    return [Alternative(i, t, p) for i, (t, p) in enumerate(targets)]
