"""The Ethical Layer cycle: human model, generation, prediction, evaluation, enforcement."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .evaluation import EvaluationRecord, evaluate_cycle
from .generation import Alternative, generate
from .human_model import InferredIntent, build_intents
from .kinematics import WorldState
from .prediction import PredictedOutcome, predict
from .world import Scenario, Vec2


@dataclass(frozen=True)
class Override:
    target: Vec2
    provenance: str


@dataclass(frozen=True)
class GovernorState:
    cycle: int
    active_override: Optional[Override]
    base_goal: Optional[str]
    command_issued: bool = False

    def base_target(self, scenario: Scenario) -> Optional[Vec2]:
        return scenario.goal(self.base_goal).position if self.base_goal is not None else None


@dataclass(frozen=True)
class GoalChange:
    target: Optional[Vec2]


@dataclass(frozen=True)
class CycleResult:
    state: GovernorState
    goal_change: Optional[GoalChange]
    record: EvaluationRecord
    intents: list[InferredIntent]
    alternatives: list[Alternative]
    outcomes: list[PredictedOutcome]


def initial_governor_state(scenario: Scenario) -> GovernorState:
    return GovernorState(0, None, scenario.robot.base_goal, False)


def apply_command(gstate: GovernorState, scenario: Scenario) -> GovernorState:
    if scenario.command is None:
        return gstate
    return replace(gstate, base_goal=scenario.command, command_issued=True)


def governor_cycle(history: Sequence[WorldState], gstate: GovernorState,
                   scenario: Scenario) -> CycleResult:
    """One pass of the Ethical Layer over the latest snapshot in ``history``.

    Only the robot's goal is ever changed. An enforced alternative becomes
    the active override; a later no-action cycle clears it and restores the
    base goal.
    """
    world = history[-1]
    cycle = gstate.cycle + 1
    intents = build_intents(history, scenario)
    alternatives = generate(intents, scenario)
    outcomes = [predict(world, alt, intents, scenario) for alt in alternatives]
    record = evaluate_cycle(outcomes, scenario, gstate.command_issued, cycle=cycle)

    current_goal = world.agent(scenario.robot.id).current_goal
    change = None
    override = gstate.active_override
    if record.decision.enforce is not None:
        chosen = alternatives[record.decision.enforce]
        override = Override(chosen.target, chosen.provenance)
        # Re-sending the same goal would release a latched halt for nothing.
        if current_goal != chosen.target:
            change = GoalChange(chosen.target)
    elif override is not None:
        override = None
        base = gstate.base_target(scenario)
        if current_goal != base:
            change = GoalChange(base)

    new_state = replace(gstate, cycle=cycle, active_override=override)
    return CycleResult(new_state, change, record, intents, alternatives, outcomes)
