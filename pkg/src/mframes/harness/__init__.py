"""Scenario I/O, random instances and theorem suites."""

from .instances import PROFILES, Dims, paper_example, random_instance
from .io import DEFAULT_TOLERANCES, SCENARIO_SCHEMA, Scenario, canonical_dumps, dumps, load, loads, save, validate

__all__ = ["PROFILES", "Dims", "paper_example", "random_instance", "DEFAULT_TOLERANCES", "SCENARIO_SCHEMA",
           "Scenario", "canonical_dumps", "dumps", "load", "loads", "save", "validate"]
