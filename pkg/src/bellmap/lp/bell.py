"""Local-realistic model existence and critical visibility via LP.

A two-party experiment with m settings per observer and d outcomes admits a
local-realistic model exactly when a joint distribution over all ``d**(2m)``
outcome assignments reproduces every setting-pair table as a marginal sum.
Feasibility of that linear system is decided by the simplex solver; the
critical visibility is the largest ``v`` for which the mixed table
``v * signal + (1 - v) * noise`` stays feasible, obtained from one LP with
``v`` as an extra bounded variable:

    maximize v   s.t.   M p - v (P_sig - P_noise) = P_noise,  p >= 0,  0 <= v <= 1

where ``M`` is the 0/1 marginalization matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..core.tables import ProbabilityTable
from ..errors import ScenarioError, SolverFailure
from .simplex import LpSolution, SimplexSolver

OPTIMAL = "optimal"
NO_VIOLATION = "no_violation"
SOLVER_FAILURE = "solver_failure"

MARGINAL_TOL = 1e-8
DEGENERATE_TOL = 1e-12

_DEFAULT_SOLVER = SimplexSolver()


@lru_cache(maxsize=None)
def _atom_digits(m: int, d: int) -> np.ndarray:
    """(2m, d**2m) array: digit ``pos`` of every atom index, a-digits first."""
    n = d ** (2 * m)
    idx = np.arange(n)
    digits = np.empty((2 * m, n), dtype=np.int64)
    for pos in range(2 * m):
        digits[pos] = (idx // d ** (2 * m - 1 - pos)) % d
    digits.setflags(write=False)
    return digits


@lru_cache(maxsize=None)
def marginal_matrix(m: int, d: int) -> np.ndarray:
    """0/1 matrix mapping a joint distribution to its m*m*d*d marginals.

    Row ``((i*m + k)*d + a)*d + b`` sums the ``d**(2m-2)`` atoms whose i-th
    a-digit is ``a`` and k-th b-digit is ``b``; the row ordering matches
    ``ProbabilityTable.probs.ravel()``.
    """
    digits = _atom_digits(m, d)
    n = d ** (2 * m)
    mat = np.zeros((m * m * d * d, n))
    idx = np.arange(n)
    for i in range(m):
        for k in range(m):
            rows = ((i * m + k) * d + digits[i]) * d + digits[m + k]
            mat[rows, idx] = 1.0
    mat.setflags(write=False)
    return mat


def atom_index(assignment: tuple[int, ...], m: int, d: int) -> int:
    """Flat index of the deterministic strategy (a_1..a_m, b_1..b_m)."""
    if len(assignment) != 2 * m:
        raise ScenarioError(f"assignment needs {2 * m} outcomes, got {len(assignment)}")
    idx = 0
    for outcome in assignment:
        if not 0 <= outcome < d:
            raise ScenarioError(f"outcome {outcome} out of range for d={d}")
        idx = idx * d + outcome
    return idx


def deterministic_atom_table(assignment: tuple[int, ...], m: int, d: int) -> ProbabilityTable:
    """Probability table of one deterministic local strategy.

    Used as a brute-force oracle: the atom itself is a local-realistic model
    of its own table.
    """
    probs = np.zeros((m, m, d, d))
    a_part = assignment[:m]
    b_part = assignment[m:]
    atom_index(assignment, m, d)  # validates ranges
    for i in range(m):
        for k in range(m):
            probs[i, k, a_part[i], b_part[k]] = 1.0
    return ProbabilityTable(probs)


@dataclass(frozen=True)
class LrLpInstance:
    """LP data for one (signal, noise) pair.

    Variables: the ``d**(2m)`` joint-distribution atoms followed by the
    visibility ``v``; constraints: one marginal equality per (i, k, a, b).
    The overall normalization of the atoms is implied by any (i, k) marginal
    block and is asserted after solving rather than added as a row.
    """

    signal: ProbabilityTable
    noise: ProbabilityTable

    def __post_init__(self):
        if (self.signal.m, self.signal.d) != (self.noise.m, self.noise.d):
            raise ScenarioError("signal and noise tables must share (m, d)")

    @property
    def m(self) -> int:
        return self.signal.m

    @property
    def d(self) -> int:
        return self.signal.d

    @property
    def atom_count(self) -> int:
        return self.d ** (2 * self.m)

    @property
    def variable_count(self) -> int:
        return self.atom_count + 1

    @property
    def constraint_count(self) -> int:
        return self.m * self.m * self.d * self.d

    def build(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Assemble (A, b, c, upper) for ``SimplexSolver.solve``."""
        mat = marginal_matrix(self.m, self.d)
        delta = (self.signal.probs - self.noise.probs).ravel()
        A = np.hstack([mat, -delta[:, np.newaxis]])
        b = self.noise.probs.ravel().copy()
        c = np.zeros(self.variable_count)
        c[-1] = 1.0
        upper = np.full(self.variable_count, np.inf)
        upper[-1] = 1.0
        return A, b, c, upper

    def write_lp(self, path: str | Path) -> None:
        """Dump the instance in CPLEX LP text format for external solvers."""
        mat = marginal_matrix(self.m, self.d)
        delta = (self.signal.probs - self.noise.probs).ravel()
        rhs = self.noise.probs.ravel()
        lines = [f"\\ LR-model visibility LP, m={self.m} d={self.d}", "Maximize", " obj: v",
                 "Subject To"]
        for r in range(self.constraint_count):
            atoms = np.nonzero(mat[r])[0]
            terms = " ".join(f"+ p{j}" for j in atoms)
            lines.append(f" r{r}: {terms} {-delta[r]:+.17g} v = {rhs[r]:.17g}")
        lines += ["Bounds", " 0 <= v <= 1", "End", ""]
        Path(path).write_text("\n".join(lines))


@dataclass
class VisibilityResult:
    """Largest LP-feasible visibility together with its certificate."""

    v_crit: float
    status: str
    witness: np.ndarray | None = None
    iterations: int = 0
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != SOLVER_FAILURE


def _witness_checks(instance: LrLpInstance, x: np.ndarray, v: float) -> str | None:
    """Return a failure description unless the solution certifies itself."""
    p = x[:-1]
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        return f"witness normalization defect {abs(total - 1.0):g}"
    mixed = v * instance.signal.probs + (1.0 - v) * instance.noise.probs
    resid = marginal_matrix(instance.m, instance.d) @ p - mixed.ravel()
    worst = np.abs(resid).max()
    if worst > MARGINAL_TOL:
        return f"marginal residual {worst:g}"
    return None


def critical_visibility(signal: ProbabilityTable, noise: ProbabilityTable, *,
                        solver: SimplexSolver | None = None,
                        dump_path: str | Path | None = None) -> VisibilityResult:
    """Maximal v in [0, 1] keeping ``v*signal + (1-v)*noise`` locally modelable.

    Returns status ``no_violation`` (v_crit = 1) when even the pure signal
    table admits a local-realistic model, ``optimal`` with an explicit
    witness distribution otherwise, and ``solver_failure`` on any numerical
    breakdown -- failures are reported, never clamped.
    """
    instance = LrLpInstance(signal, noise)
    if np.abs(signal.probs - noise.probs).max() < DEGENERATE_TOL:
        return VisibilityResult(1.0, NO_VIOLATION, None, 0, "signal equals noise")
    if dump_path is not None:
        instance.write_lp(dump_path)
    lp_solver = solver if solver is not None else _DEFAULT_SOLVER
    A, b, c, upper = instance.build()
    sol: LpSolution = lp_solver.solve(A, b, c, upper)
    if not sol.is_optimal:
        return VisibilityResult(0.0, SOLVER_FAILURE, None, sol.iterations,
                                f"LP terminated with status {sol.status}")
    v = float(sol.x[-1])
    defect = _witness_checks(instance, sol.x, min(v, 1.0))
    if defect is not None:
        return VisibilityResult(0.0, SOLVER_FAILURE, None, sol.iterations, defect)
    witness = np.clip(sol.x[:-1], 0.0, None)
    if v >= 1.0 - 1e-9:
        return VisibilityResult(1.0, NO_VIOLATION, witness, sol.iterations)
    return VisibilityResult(v, OPTIMAL, witness, sol.iterations)


def lr_feasible(table: ProbabilityTable, *,
                solver: SimplexSolver | None = None) -> tuple[bool, np.ndarray | None]:
    """Does a local-realistic joint distribution reproduce ``table``?

    Returns ``(True, witness)`` or ``(False, None)``; raises
    :class:`SolverFailure` on numerical breakdown.
    """
    lp_solver = solver if solver is not None else _DEFAULT_SOLVER
    mat = marginal_matrix(table.m, table.d)
    n = mat.shape[1]
    sol = lp_solver.solve(mat, table.probs.ravel(), np.zeros(n), np.full(n, np.inf))
    if sol.status == "infeasible":
        return False, None
    if not sol.is_optimal:
        raise SolverFailure(f"feasibility LP terminated with status {sol.status}")
    p = sol.x
    resid = np.abs(mat @ p - table.probs.ravel()).max()
    if resid > MARGINAL_TOL:
        raise SolverFailure(f"feasibility witness residual {resid:g}")
    return True, np.clip(p, 0.0, None)
