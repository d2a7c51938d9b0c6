# File: src/scenarios/__init__.py
# Command-line scenarios

from .runner import SCENARIO_RUNNERS, ScenarioResult, run_scenario

__all__ = [
    'SCENARIO_RUNNERS',
    'ScenarioResult',
    'run_scenario',
]
