"""Scenario-driven command-line interface."""
from .main import RunReport, TaskRecord, build_parser, main, run, run_scenario, selfcheck
from .scenario import Scenario, ScenarioError, parse_scenario

__all__ = ["RunReport", "TaskRecord", "build_parser", "main", "run", "run_scenario", "selfcheck",
           "Scenario", "ScenarioError", "parse_scenario"]
