"""
Command-line front end: scenario configs, the runner and the argument parser
"""
from src.cli.main import RunLogger, build_parser, main
from src.cli.runner import ScenarioRunner, parse_sweep, run_sweep
from src.cli.scenario import (
    SCENARIO_KINDS,
    ScenarioConfig,
    apply_overrides,
    load_scenario,
    parse_scenario,
    scenario_schema,
)

__all__ = [
    'SCENARIO_KINDS',
    'RunLogger',
    'ScenarioConfig',
    'ScenarioRunner',
    'apply_overrides',
    'build_parser',
    'load_scenario',
    'main',
    'parse_scenario',
    'parse_sweep',
    'run_sweep',
    'scenario_schema',
]
