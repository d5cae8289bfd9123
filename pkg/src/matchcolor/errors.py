"""Exception types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed graph or list input; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CapacityError(RuntimeError):
    """An exact computation was asked to exceed its size cap."""


class InfeasibleTargetError(ValueError):
    """Requested marginals lie outside the matching polytope.

    Uniform marginals 1/c are achievable by a hard-core distribution if and
    only if the fractional chromatic index of the host is strictly below c.
    """


class CalibrationError(RuntimeError):
    """Activity calibration failed to converge; ``best`` holds the last iterate."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class LocalSearchError(RuntimeError):
    """A flaw-driven local search exhausted its step budget; carries the trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class RoundError(RuntimeError):
    """A coloring round failed after all retries; carries the last trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class GreedyBlockedError(RuntimeError):
    """Greedy list completion found an edge with no usable color."""

    def __init__(self, edge: int, message: str | None = None):
        super().__init__(message or f"no usable color for edge {edge}")
        self.edge = edge
