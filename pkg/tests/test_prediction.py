import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ethical_layer.generation import Alternative
from ethical_layer.human_model import InferredIntent
from ethical_layer.kinematics import AgentState, WorldState
from ethical_layer.prediction import HORIZON_S, final_distance, predict
from ethical_layer.world import GoalSite, Vec2, scenario_from_dict
from oracles import FINE_DT, brute_force_finals

R = 0.5


def make_case(robot_pos, robot_speed, target, humans, goals=((2.5, 0.6), (2.5, 1.9)), danger=(True, False)):
    """humans: list of (start, goal-or-None, speed)."""
    cfg = {
        "schema_version": 1,
        "arena": {"width": 3.0, "height": 2.5},
        "goals": [
            {"id": "A", "position": list(goals[0]), "dangerous": danger[0]},
            {"id": "B", "position": list(goals[1]), "dangerous": danger[1]},
        ],
        "agents": [{"id": "robot", "role": "ethical-robot", "start": {"position": list(robot_pos)},
                    "base_goal": None, "nominal_speed": robot_speed}]
        + [{"id": f"h{i}", "role": "human", "start": {"position": list(h[0])}, "base_goal": None,
            "nominal_speed": 0.03} for i, h in enumerate(humans)],
    }
    scenario = scenario_from_dict(cfg)
    agents = [AgentState("robot", Vec2(*robot_pos), Vec2(1, 0), None)]
    intents = []
    for i, (start, goal, speed) in enumerate(humans):
        agents.append(AgentState(f"h{i}", Vec2(*start), Vec2(1, 0), None))
        moving = goal is not None
        end = Vec2(*goal) if moving else Vec2(*goals[0])
        intents.append(InferredIntent(f"h{i}", "A", (Vec2(*start), end), moving, speed if moving else 0.0))
    world = WorldState(0, 0.0, tuple(agents), 0)
    alt = Alternative(0, Vec2(*target), "path-point(h0,2)")
    return scenario, world, alt, intents


def oracle_finals(robot_pos, robot_speed, target, humans):
    pos = [robot_pos] + [h[0] for h in humans]
    dest = [target] + [h[1] if h[1] is not None else h[0] for h in humans]
    speed = [robot_speed] + [h[2] if h[1] is not None else 0.0 for h in humans]
    moving = [True] + [h[1] is not None for h in humans]
    out = brute_force_finals(np.array(pos, float), np.array(dest, float), np.array(speed, float),
                             np.array(moving), R, FINE_DT, HORIZON_S)
    ids = ["robot"] + [f"h{i}" for i in range(len(humans))]
    return {k: Vec2(*out[i]) for i, k in enumerate(ids)}


def test_no_interaction_ends_at_destination():
    s, w, alt, intents = make_case((0.4, 1.25), 0.08, (2.5, 1.9), [((0.8, 0.6), None, 0.0)])
    out = predict(w, alt, intents, s)
    assert out.final_positions["robot"] == Vec2(2.5, 1.9)
    assert out.final_positions["h0"] == Vec2(0.8, 0.6)
    assert out.stop_causes == {"robot": "reached-goal", "h0": "stationary"}


def test_robot_at_midpoint_first_stops_human_half_a_metre_short():
    human = ((0.5, 0.6), (2.5, 0.6), 0.03)
    mid = (1.5, 0.6)
    s, w, alt, intents = make_case((1.5, 1.4), 0.08, mid, [human])
    out = predict(w, alt, intents, s)
    ref = oracle_finals((1.5, 1.4), 0.08, mid, [human])
    # Robot arrives in 10 s; the human walks on until 0.5 m short of it.
    assert out.final_positions["robot"] == Vec2(*mid)
    assert out.final_positions["h0"].x == pytest.approx(1.0, abs=1e-9)
    for k in ref:
        assert out.final_positions[k].dist(ref[k]) < 0.02
    assert out.final_positions["robot"].dist(out.final_positions["h0"]) == pytest.approx(R, abs=1e-9)
    assert out.stop_causes["h0"] == "proximity-stop"


def test_humans_stop_each_other_without_the_robot():
    humans = [((0.5, 0.5), (2.5, 2.0), 0.05), ((0.5, 2.0), (2.5, 0.5), 0.05)]
    s, w, alt, intents = make_case((0.1, 1.25), 0.08, (0.1, 1.25), humans)
    out = predict(w, alt, intents, s)
    assert out.stop_causes["h0"] == out.stop_causes["h1"] == "proximity-stop"
    assert out.final_positions["h0"].dist(out.final_positions["h1"]) == pytest.approx(R, abs=1e-9)
    # Symmetric paths meet at the crossing point x = 1.5.
    assert out.final_positions["h0"].x == pytest.approx(out.final_positions["h1"].x, abs=1e-12)
    ref = oracle_finals((0.1, 1.25), 0.08, (0.1, 1.25), humans)
    for k in ref:
        assert out.final_positions[k].dist(ref[k]) < 0.02


def test_final_distance():
    s, w, alt, intents = make_case((1.0, 0.0), 0.08, (1.0, 0.0), [((0.1, 2.4), None, 0.0)])
    out = predict(w, alt, intents, s)
    assert final_distance(out, "robot", GoalSite("X", Vec2(1.0, 0.0))) == 0.0
    assert final_distance(out, "robot", GoalSite("X", Vec2(4.0, 4.0))) == 5.0
    with pytest.raises(KeyError):
        final_distance(out, "ghost", GoalSite("X", Vec2(0, 0)))


def test_horizon_stops_slow_agents():
    s, w, alt, intents = make_case((0.1, 0.1), 0.01, (2.9, 2.4), [((0.1, 2.4), None, 0.0)])
    out = predict(w, alt, intents, s)
    assert out.stop_causes["robot"] == "horizon"
    assert out.final_positions["robot"].dist(Vec2(0.1, 0.1)) == pytest.approx(0.01 * HORIZON_S, abs=1e-9)


def random_case(rng):
    goals = rng.uniform([0.1, 0.1], [2.9, 2.4], size=(2, 2))
    humans = []
    for _ in range(rng.integers(1, 3)):
        start = tuple(rng.uniform([0.1, 0.1], [2.9, 2.4]))
        goal = tuple(goals[rng.integers(0, 2)]) if rng.random() < 0.8 else None
        humans.append((start, goal, float(rng.uniform(0.01, 0.08))))
    robot = tuple(rng.uniform([0.1, 0.1], [2.9, 2.4]))
    target = tuple(rng.uniform([0.1, 0.1], [2.9, 2.4]))
    return robot, float(rng.uniform(0.03, 0.1)), target, humans, tuple(map(tuple, goals))


def oracle_agreement(n_cases: int, seed: int) -> tuple[int, float]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        robot, speed, target, humans, goals = random_case(rng)
        s, w, alt, intents = make_case(robot, speed, target, humans, goals)
        out = predict(w, alt, intents, s)
        ref = oracle_finals(robot, speed, target, humans)
        worst = max(worst, max(out.final_positions[k].dist(ref[k]) for k in ref))
    return n_cases, worst


def test_oracle_agreement_small_batch():
    _, worst = oracle_agreement(40, seed=11)
    assert worst < 0.02


def _mirror(p, h=2.5):
    return (p[0], h - p[1])


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_mirror_symmetry(seed):
    robot, speed, target, humans, goals = random_case(np.random.default_rng(seed))
    s, w, alt, intents = make_case(robot, speed, target, humans, goals)
    out = predict(w, alt, intents, s)
    m_humans = [(_mirror(a), None if g is None else _mirror(g), v) for a, g, v in humans]
    ms, mw, malt, mint = make_case(_mirror(robot), speed, _mirror(target), m_humans,
                                   tuple(_mirror(g) for g in goals))
    mout = predict(mw, malt, mint, ms)
    for k, p in out.final_positions.items():
        q = mout.final_positions[k]
        assert q.x == pytest.approx(p.x, abs=1e-9)
        assert q.y == pytest.approx(2.5 - p.y, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_pure_function(seed):
    case = random_case(np.random.default_rng(seed))
    s, w, alt, intents = make_case(*case[:4], case[4])
    assert predict(w, alt, intents, s) == predict(w, alt, intents, s)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_no_contact_means_destinations(seed):
    robot, speed, target, humans, goals = random_case(np.random.default_rng(seed))
    s, w, alt, intents = make_case(robot, speed, target, humans, goals)
    out = predict(w, alt, intents, s)
    if "proximity-stop" in out.stop_causes.values() or "horizon" in out.stop_causes.values():
        return
    assert out.final_positions["robot"] == Vec2(*target)
    for i, (start, goal, _) in enumerate(humans):
        assert out.final_positions[f"h{i}"] == Vec2(*(goal if goal is not None else start))


def test_departing_from_a_close_human_is_not_a_stop():
    s, w, alt, intents = make_case((1.0, 1.0), 0.08, (2.5, 2.0), [((0.7, 0.8), None, 0.0)])
    out = predict(w, alt, intents, s)
    assert out.stop_causes["robot"] == "reached-goal"


def test_approaching_a_close_human_stops_at_once():
    s, w, alt, intents = make_case((1.0, 1.0), 0.08, (0.2, 0.2), [((0.7, 0.8), None, 0.0)])
    out = predict(w, alt, intents, s)
    assert out.stop_causes["robot"] == "proximity-stop"
    assert out.final_positions["robot"] == Vec2(1.0, 1.0)
    assert math.isfinite(out.final_positions["h0"].x)
