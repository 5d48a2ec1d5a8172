"""Linear programming over local-realistic joint distributions."""

from .bell import (NO_VIOLATION, OPTIMAL, SOLVER_FAILURE, LrLpInstance, VisibilityResult,
                   atom_index, critical_visibility, deterministic_atom_table, lr_feasible,
                   marginal_matrix)
from .simplex import LpSolution, SimplexSolver

__all__ = [
    "NO_VIOLATION", "OPTIMAL", "SOLVER_FAILURE", "LrLpInstance", "VisibilityResult",
    "atom_index", "critical_visibility", "deterministic_atom_table", "lr_feasible",
    "marginal_matrix", "LpSolution", "SimplexSolver",
]
