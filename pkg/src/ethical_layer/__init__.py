"""Ethical Layer: a consequence-engine governor for a simulated robot among humans.

Each governor cycle infers human goals, generates candidate robot targets,
predicts the outcome of each with a ballistic simulation, scores them and,
when one is decisively better, overrides the robot's goal.
"""

from .runner import run, simulate, sweep
from .world import PRESET_NAMES, Scenario, ScenarioError, load_scenario, preset

__all__ = ["PRESET_NAMES", "Scenario", "ScenarioError", "load_scenario", "preset", "run", "simulate", "sweep"]
__version__ = "0.1.0"
