"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(ValueError):
    """A data record (curve, layer, design) violates its invariants."""


class PlanningError(ValueError):
    """A parallel plan cannot be built for the requested model and panel count."""


class SolverError(RuntimeError):
    def __init__(self, message: str, last_iterate: float):
        super().__init__(f"{message} (last iterate {last_iterate:.6f} K)")
        self.last_iterate = last_iterate


class ScenarioError(Exception):
    """Base class for scenario-file problems; ``exit_code`` is used by the CLI."""

    exit_code = 2


class ScenarioParseError(ScenarioError):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class UnknownKeyError(ScenarioError):
    exit_code = 5


class UnitMismatchError(ScenarioError):
    exit_code = 6


class InvariantViolation(ScenarioError):
    exit_code = 7
