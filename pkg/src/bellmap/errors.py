"""Exception types shared across the package."""

from __future__ import annotations


class BellmapError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(BellmapError, ValueError):
    """Invalid or mismatched Hilbert-space dimension."""


class ParametrizationError(BellmapError, ValueError):
    """Angle vector incompatible with the requested observable kind."""


class StateError(BellmapError, ValueError):
    """State vector / density matrix violates its invariants."""


class NoiseError(BellmapError, ValueError):
    """Custom noise matrix fails density-matrix validation."""


class ScenarioError(BellmapError, ValueError):
    """Inconsistent measurement scenario (dimensions, setting counts)."""


class TableError(BellmapError, ValueError):
    """Probability table violates nonnegativity or normalization."""


class SolverFailure(BellmapError, RuntimeError):
    """Numerical breakdown inside the linear-programming solver."""


class OptimizerError(BellmapError, RuntimeError):
    """Derivative-free optimization failed (non-finite objective, all restarts failed)."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class FileFormatError(BellmapError, ValueError):
    """Malformed input file; carries line/column diagnostics when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
