"""Exceptions raised by the strike planner."""

# License: MIT


class CRSPError(Exception):
    """Base class of every error raised by CRSP."""


class ValidationError(CRSPError, ValueError):
    """A parameter violates its documented constraint.

    Args:
        field: dotted path of the offending field, e.g. "physics.e"
        message: human readable constraint, e.g. "e must be in (0,1]"
    """

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class ScenarioParseError(CRSPError):
    """A scenario file is not well-formed JSON."""

    def __init__(self, path, message, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = f"{path}"
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}")


class NoImpactError(CRSPError, ValueError):
    """The ball is not approaching the racket face, so no impact occurs."""


class DivergenceError(CRSPError, FloatingPointError):
    """Propagation produced a non-finite state."""


class InfeasibleError(CRSPError, RuntimeError):
    """The optimizer never evaluated a finite cost.

    `history` holds the g_best_cost sequence of the failed run.
    """

    def __init__(self, message, history=None):
        self.history = history
        super().__init__(message)


class NoWindowError(CRSPError, ValueError):
    """The incoming trajectory never enters the robot workspace."""
