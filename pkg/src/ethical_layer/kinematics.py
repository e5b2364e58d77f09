"""Fixed-tick world stepping: straight-line motion, proximity halting, speed noise."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .world import Scenario, Vec2

OBSERVATION_WINDOW_S = 0.5


@dataclass(frozen=True)
class AgentState:
    id: str
    position: Vec2
    heading: Vec2
    current_goal: Optional[Vec2]
    halted: bool = False
    # Latched halts persist until set_goal; this records why the latch engaged
    # ("goal" or the id of the agent that was too close).
    halt_cause: Optional[str] = None


@dataclass(frozen=True)
class WorldState:
    tick: int
    time: float
    agents: tuple[AgentState, ...]
    seed: int

    def agent(self, agent_id: str) -> AgentState:
        for a in self.agents:
            if a.id == agent_id:
                return a
        raise KeyError(f"unknown agent id {agent_id!r}")


def _aim(position: Vec2, goal: Optional[Vec2], fallback: Vec2) -> Vec2:
    if goal is None:
        return fallback
    d = goal - position
    return d.unit() if d.norm() > 0.0 else fallback


def initial_state(scenario: Scenario, goals: Optional[dict[str, Optional[str]]] = None) -> WorldState:
    """World at tick 0; ``goals`` overrides the per-agent base goal ids."""
    agents = []
    for spec in scenario.agents:
        goal_id = spec.base_goal if goals is None or spec.id not in goals else goals[spec.id]
        goal = scenario.goal(goal_id).position if goal_id is not None else None
        pos = spec.start.position
        agents.append(AgentState(spec.id, pos, _aim(pos, goal, spec.start.heading), goal))
    return WorldState(0, 0.0, tuple(agents), scenario.seed)


def _speed_factors(state: WorldState, scenario: Scenario) -> list[float]:
    sigmas = [a.speed_noise_sigma for a in scenario.agents]
    if not any(sigmas):
        return [1.0] * len(sigmas)
    # Counter-based draws keep step() a pure function of (state, scenario).
    draws = np.random.default_rng([state.seed, state.tick]).standard_normal(len(sigmas))
    return [max(0.0, 1.0 + s * float(z)) for s, z in zip(sigmas, draws)]


def step(state: WorldState, scenario: Scenario) -> WorldState:
    """Advance one tick.

    Displacements are computed from the pre-step snapshot, then halting is
    evaluated on post-move positions. A pair closer than the proximity radius
    halts both members unless the step moved them apart.
    """
    dt = scenario.dt
    r = scenario.params.proximity_radius
    factors = _speed_factors(state, scenario)
    specs = {s.id: s for s in scenario.agents}

    moved = []
    for a, factor in zip(state.agents, factors):
        if a.halted or a.current_goal is None:
            moved.append(a)
            continue
        delta = a.current_goal - a.position
        remaining = delta.norm()
        travel = min(specs[a.id].nominal_speed * factor * dt, remaining)
        if remaining > 0.0:
            heading = delta.unit()
            pos = a.current_goal if travel >= remaining else a.position + heading * travel
        else:
            heading, pos = a.heading, a.position
        moved.append(replace(a, position=pos, heading=heading))

    halted = [a.halted for a in moved]
    causes = [a.halt_cause for a in moved]
    for i, a in enumerate(moved):
        if not halted[i] and a.current_goal is not None and a.position.dist(a.current_goal) < r:
            halted[i], causes[i] = True, "goal"
    n = len(moved)
    for i in range(n):
        for j in range(i + 1, n):
            post = moved[i].position.dist(moved[j].position)
            if post >= r:
                continue
            pre = state.agents[i].position.dist(state.agents[j].position)
            if post > pre:
                continue
            for k, other in ((i, j), (j, i)):
                if not halted[k]:
                    halted[k], causes[k] = True, moved[other].id

    agents = tuple(replace(a, halted=h, halt_cause=c) for a, h, c in zip(moved, halted, causes))
    tick = state.tick + 1
    return WorldState(tick, tick / scenario.params.tick_hz, agents, state.seed)


def set_goal(state: WorldState, agent_id: str, goal: Optional[Vec2]) -> WorldState:
    """Replace an agent's goal, releasing any latched halt."""
    agents = []
    found = False
    for a in state.agents:
        if a.id == agent_id:
            found = True
            a = replace(a, current_goal=goal, halted=False, halt_cause=None,
                        heading=_aim(a.position, goal, a.heading))
        agents.append(a)
    if not found:
        raise KeyError(f"unknown agent id {agent_id!r}")
    return replace(state, agents=tuple(agents))


def observed_speed(history: Sequence[WorldState], agent_id: str,
                   window: float = OBSERVATION_WINDOW_S) -> float:
    """Net displacement per second over the trailing window of ``history``."""
    if len(history) < 2:
        return 0.0
    last = history[-1]
    first = None
    for s in history:
        if s.time >= last.time - window - 1e-9:
            first = s
            break
    if first is None or last.time <= first.time:
        return 0.0
    p0 = first.agent(agent_id).position
    p1 = last.agent(agent_id).position
    return p0.dist(p1) / (last.time - first.time)
