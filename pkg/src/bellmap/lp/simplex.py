"""Dense two-phase primal simplex with bounded variables.

Solves ``max c.x  s.t.  A x = b,  0 <= x <= u`` (``u`` entries may be
``inf``).  The implementation is a full-tableau simplex: Dantzig pricing
restricted to a cyclically moving column window (partial pricing), with a
permanent switch to Bland's rule after a run of degenerate steps so cycling
cannot occur.  Instances in this package are small (tens of rows, at most a
few thousand columns), where a dense tableau is both the fastest and the
most predictable option; the hot loop is JIT-compiled.

Everything is deterministic: identical inputs produce identical pivots and
identical solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency, but keep a fallback
    njit = None

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3
NUMERICAL = 4

_STATUS_NAMES = {
    OPTIMAL: "optimal",
    INFEASIBLE: "infeasible",
    UNBOUNDED: "unbounded",
    ITERATION_LIMIT: "iteration_limit",
    NUMERICAL: "numerical",
}

_PIVOT_TOL = 1e-9
_TIE_TOL = 1e-10


def _kernel_impl(A, b, c, upper, tol_feas, tol_opt, max_iter, price_window):
    m, n = A.shape
    nt = n + m
    inf = np.inf

    # Rows 0..m-1: constraints, RHS column nt holds current basic values.
    # Row m: phase-1 reduced costs; row m+1: phase-2 reduced costs.
    T = np.zeros((m + 2, nt + 1))
    for r in range(m):
        if b[r] < 0.0:
            for j in range(n):
                T[r, j] = -A[r, j]
            T[r, nt] = -b[r]
        else:
            for j in range(n):
                T[r, j] = A[r, j]
            T[r, nt] = b[r]
        T[r, n + r] = 1.0

    ub = np.empty(nt)
    for j in range(n):
        ub[j] = upper[j]
    for j in range(n, nt):
        ub[j] = inf

    basis = np.empty(m, np.int64)
    vstat = np.zeros(nt, np.int8)  # 0 at lower, 1 at upper, 2 basic
    for r in range(m):
        basis[r] = n + r
        vstat[n + r] = 2

    # Initial reduced costs: phase 1 maximizes -(sum of artificials) whose
    # basic multipliers are all -1; phase 2 starts from y = 0.
    for j in range(n):
        s = 0.0
        for r in range(m):
            s += T[r, j]
        T[m, j] = s
        T[m + 1, j] = c[j]

    bland = False
    degen_run = 0
    stall_limit = 50 * (m + 2) + 200
    price_start = 0
    iters = 0

    for phase in range(1, 3):
        cost = m if phase == 1 else m + 1
        while True:
            if phase == 1:
                inf_sum = 0.0
                for r in range(m):
                    if basis[r] >= n:
                        inf_sum += abs(T[r, nt])
                if inf_sum <= tol_feas:
                    break

            iters += 1
            if iters > max_iter:
                return ITERATION_LIMIT, np.zeros(n), iters

            # --- pricing ---------------------------------------------------
            j_in = -1
            sgn = 1.0
            if bland:
                for j in range(n):
                    st = vstat[j]
                    if st == 2:
                        continue
                    dj = T[cost, j]
                    if st == 0 and dj > tol_opt:
                        j_in = j
                        sgn = 1.0
                        break
                    if st == 1 and dj < -tol_opt:
                        j_in = j
                        sgn = -1.0
                        break
            else:
                best = tol_opt
                pos = price_start
                scanned = 0
                while scanned < n:
                    jend = pos + price_window
                    if jend > n:
                        jend = n
                    for j in range(pos, jend):
                        st = vstat[j]
                        if st == 2:
                            continue
                        dj = T[cost, j]
                        if st == 0:
                            if dj > best:
                                best = dj
                                j_in = j
                                sgn = 1.0
                        elif dj < -best:
                            best = -dj
                            j_in = j
                            sgn = -1.0
                    scanned += jend - pos
                    pos = 0 if jend >= n else jend
                    if j_in >= 0:
                        break
                price_start = pos

            if j_in < 0:
                if phase == 1:
                    return INFEASIBLE, np.zeros(n), iters
                break  # phase-2 optimum

            # --- ratio test ------------------------------------------------
            t_best = ub[j_in]  # bound flip of the entering variable
            r_out = -1
            leave_up = False
            g_best = 0.0
            for r in range(m):
                g = sgn * T[r, j_in]
                if g > _PIVOT_TOL:
                    tr = T[r, nt] / g
                    to_upper = False
                elif g < -_PIVOT_TOL:
                    ubr = ub[basis[r]]
                    if ubr == inf:
                        continue
                    tr = (ubr - T[r, nt]) / (-g)
                    to_upper = True
                else:
                    continue
                if tr < 0.0:
                    tr = 0.0
                if tr < t_best - _TIE_TOL:
                    t_best = tr
                    r_out = r
                    leave_up = to_upper
                    g_best = g
                elif tr <= t_best + _TIE_TOL and r_out >= 0:
                    if bland:
                        if basis[r] < basis[r_out]:
                            r_out = r
                            leave_up = to_upper
                            g_best = g
                    elif abs(g) > abs(g_best):
                        r_out = r
                        leave_up = to_upper
                        g_best = g

            if t_best == inf:
                # The phase-1 objective is bounded, so no blocking row there
                # means the tableau has drifted.
                st = NUMERICAL if phase == 1 else UNBOUNDED
                return st, np.zeros(n), iters

            if r_out < 0:
                # Entering variable runs to its other bound; no basis change.
                u_in = ub[j_in]
                for r in range(m):
                    T[r, nt] -= sgn * u_in * T[r, j_in]
                vstat[j_in] = 1 - vstat[j_in]
                degen_run = 0
                continue

            if t_best <= 1e-12:
                degen_run += 1
                if degen_run > stall_limit:
                    bland = True
            else:
                degen_run = 0

            for r in range(m):
                T[r, nt] -= sgn * t_best * T[r, j_in]
            leaving = basis[r_out]
            vstat[leaving] = 1 if leave_up else 0
            x_in = t_best if sgn > 0.0 else ub[j_in] - t_best

            piv = T[r_out, j_in]
            inv_piv = 1.0 / piv
            for j in range(nt):
                T[r_out, j] *= inv_piv
            T[r_out, j_in] = 1.0
            T[r_out, nt] = x_in
            for i in range(m + 2):
                if i == r_out:
                    continue
                f = T[i, j_in]
                if f != 0.0:
                    for j in range(nt):
                        T[i, j] -= f * T[r_out, j]
                    T[i, j_in] = 0.0
            basis[r_out] = j_in
            vstat[j_in] = 2

        if phase == 1:
            # Pin every artificial to zero.  Artificials never re-enter
            # (pricing scans structural columns only) and any still basic sit
            # at level <= tol_feas; the zero upper bound makes the ratio test
            # evict them before they could grow during phase 2.
            for j in range(n, nt):
                ub[j] = 0.0

    x = np.zeros(n)
    for j in range(n):
        if vstat[j] == 1:
            x[j] = ub[j]
    residue = 0.0
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r, nt]
        elif abs(T[r, nt]) > residue:
            residue = abs(T[r, nt])
    if residue > tol_feas:
        return NUMERICAL, x, iters
    return OPTIMAL, x, iters


if njit is not None:
    _kernel = njit(cache=True)(_kernel_impl)
else:  # pragma: no cover
    _kernel = _kernel_impl


@dataclass
class LpSolution:
    """Outcome of one LP solve."""

    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


class SimplexSolver:
    """Primal simplex solver instance; see the module docstring.

    One instance is single-threaded and carries no state between calls, so
    any number of instances may solve concurrently.
    """

    def __init__(self, feasibility_tol: float = 1e-9, optimality_tol: float = 1e-9,
                 max_iterations: int | None = None, price_window: int = 40):
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.max_iterations = max_iterations
        self.price_window = price_window

    def solve(self, A: np.ndarray, b: np.ndarray, c: np.ndarray,
              upper: np.ndarray | None = None) -> LpSolution:
        """Maximize ``c.x`` subject to ``A x = b`` and ``0 <= x <= upper``."""
        A = np.ascontiguousarray(A, dtype=np.float64)
        b = np.ascontiguousarray(b, dtype=np.float64)
        c = np.ascontiguousarray(c, dtype=np.float64)
        m, n = A.shape
        if b.shape != (m,) or c.shape != (n,):
            raise ValueError("inconsistent LP dimensions")
        if upper is None:
            upper = np.full(n, np.inf)
        else:
            upper = np.ascontiguousarray(upper, dtype=np.float64)
            if upper.shape != (n,):
                raise ValueError("upper-bound vector has wrong length")
        max_iter = self.max_iterations
        if max_iter is None:
            max_iter = max(20000, 50 * (m + n))
        status, x, iters = _kernel(A, b, c, upper, self.feasibility_tol,
                                   self.optimality_tol, max_iter, self.price_window)
        if status != OPTIMAL:
            return LpSolution(_STATUS_NAMES[status], None, None, iters)
        scale = 1.0 + float(np.abs(b).max(initial=0.0))
        residual = float(np.abs(A @ x - b).max(initial=0.0))
        if residual > 1e-7 * scale or x.min(initial=0.0) < -1e-7:
            return LpSolution(_STATUS_NAMES[NUMERICAL], None, None, iters)
        return LpSolution("optimal", x, float(c @ x), iters)
