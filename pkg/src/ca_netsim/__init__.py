"""Deterministic LTE-A downlink system-level simulator for carrier aggregation."""

from .engine import run, run_combos, run_sweep
from .metrics import RunResult, compare_runs, jain_index
from .scenario import (AggregationConfig, Band, CarrierSpec, ScenarioConfig,
                       ScenarioError, enumerate_combinations, parse_scenario)

__all__ = [
    "AggregationConfig",
    "Band",
    "CarrierSpec",
    "RunResult",
    "ScenarioConfig",
    "ScenarioError",
    "compare_runs",
    "enumerate_combinations",
    "jain_index",
    "parse_scenario",
    "run",
    "run_combos",
    "run_sweep",
]

__version__ = "0.1.0"
