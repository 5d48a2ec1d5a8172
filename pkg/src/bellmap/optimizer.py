"""Derivative-free minimization of the critical visibility over angles.

The critical visibility is a continuous but non-differentiable function of
the measurement angles (it is the value of an LP whose data depend on them),
so the outer loop is a Nelder-Mead simplex search, restarted from many
random angle vectors.  The reported minimum is an upper bound on the true
one: it never exceeds any evaluated point, and more restarts can only lower
it.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .core.noise import WHITE, NoiseModel, noise_state
from .core.observables import FULL_UNITARY, KINDS, ObservableSpec, angle_count
from .core.states import QuditState
from .core.tables import ProbabilityTable, probability_table, uniform_table
from .errors import OptimizerError, ParametrizationError
from .lp.bell import SOLVER_FAILURE, VisibilityResult, critical_visibility
from .lp.simplex import SimplexSolver

REFLECTION = 1.0
EXPANSION = 2.0
CONTRACTION = 0.5
SHRINK = 0.5


@dataclass(frozen=True)
class NmOptions:
    """Termination settings for one Nelder-Mead run."""

    max_iter: int = 5000
    f_tol: float = 1e-7       # spread of vertex values
    x_tol: float = 1e-7       # simplex diameter (max-norm)
    step: float = 0.25        # initial simplex offset per coordinate, radians


@dataclass
class NmResult:
    x: np.ndarray
    fx: float
    iterations: int
    evaluations: int
    converged: bool


def nelder_mead(f: Callable[[np.ndarray], float], x0: np.ndarray,
                opts: NmOptions | None = None) -> NmResult:
    """Minimize ``f`` by the Nelder-Mead simplex iteration.

    Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
    Stops when the vertex-value spread or the simplex diameter falls below
    the tolerances in ``opts`` or after ``opts.max_iter`` iterations.
    Raises :class:`OptimizerError` if ``f`` returns a non-finite value.
    """
    opts = opts or NmOptions()
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    nev = 0

    def fval(x: np.ndarray) -> float:
        nonlocal nev
        nev += 1
        v = float(f(x))
        if not math.isfinite(v):
            raise OptimizerError(f"objective returned non-finite value {v!r}", point=x.copy())
        return v

    verts = np.tile(x0, (n + 1, 1))
    for i in range(n):
        verts[i + 1, i] += opts.step
    vals = np.array([fval(v) for v in verts])

    iters = 0
    converged = False
    while True:
        order = np.argsort(vals, kind="stable")
        verts = verts[order]
        vals = vals[order]
        if vals[-1] - vals[0] < opts.f_tol:
            converged = True
            break
        if np.abs(verts[1:] - verts[0]).max() < opts.x_tol:
            converged = True
            break
        if iters >= opts.max_iter:
            break
        iters += 1

        centroid = verts[:-1].mean(axis=0)
        xr = centroid + REFLECTION * (centroid - verts[-1])
        fr = fval(xr)
        if fr < vals[0]:
            xe = centroid + EXPANSION * (xr - centroid)
            fe = fval(xe)
            if fe < fr:
                verts[-1], vals[-1] = xe, fe
            else:
                verts[-1], vals[-1] = xr, fr
        elif fr < vals[-2]:
            verts[-1], vals[-1] = xr, fr
        else:
            if fr < vals[-1]:
                xc = centroid + CONTRACTION * (xr - centroid)     # outside
            else:
                xc = centroid - CONTRACTION * (centroid - verts[-1])  # inside
            fc = fval(xc)
            if fc < min(fr, vals[-1]):
                verts[-1], vals[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    verts[i] = verts[0] + SHRINK * (verts[i] - verts[0])
                    vals[i] = fval(verts[i])

    best = int(np.argmin(vals))
    return NmResult(verts[best].copy(), float(vals[best]), iters, nev, converged)


@dataclass(frozen=True)
class ObjectiveSpec:
    """What to optimize: state, noise model, observable class, settings count.

    ``pinned`` lists per-observable angle indices that are frozen at zero
    (e.g. a three-phase restriction of the three-multiport class); the free
    angle vector then has ``2 * m * (angle_count - len(pinned))`` entries.
    """

    state: QuditState
    noise: NoiseModel
    kind: str
    m: int = 2
    pinned: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParametrizationError(f"unknown observable kind {self.kind!r}")
        if self.m < 1:
            raise ValueError(f"settings count must be >= 1, got {self.m}")
        per = angle_count(self.kind, self.state.d)
        bad = [i for i in self.pinned if not 0 <= i < per]
        if bad:
            raise ParametrizationError(f"pinned indices {bad} out of range for {per} angles")
        object.__setattr__(self, "pinned", tuple(sorted(set(self.pinned))))

    @property
    def d(self) -> int:
        return self.state.d

    @property
    def angles_per_observable(self) -> int:
        return angle_count(self.kind, self.d) - len(self.pinned)

    @property
    def n(self) -> int:
        return 2 * self.m * self.angles_per_observable


class VisibilityObjective:
    """Callable mapping a free-angle vector to the critical visibility.

    Solver failures inside ``__call__`` yield 1.0 and bump ``failures`` so
    the simplex stays well-defined; :meth:`evaluate` is the strict variant
    used to certify candidate minima.
    """

    def __init__(self, spec: ObjectiveSpec, solver: SimplexSolver | None = None):
        self.spec = spec
        self.solver = solver
        self.failures = 0
        d = spec.d
        per_full = angle_count(spec.kind, d)
        self._free_idx = np.array([i for i in range(per_full) if i not in spec.pinned])
        self._per_full = per_full
        self._noise_state = noise_state(spec.noise, spec.state)
        self._uniform = uniform_table(spec.m, d) if spec.noise.variant == WHITE else None

    def observables(self, x: np.ndarray) -> tuple[list[ObservableSpec], list[ObservableSpec]]:
        """Split a free-angle vector into Alice's and Bob's observable specs."""
        spec = self.spec
        x = np.asarray(x, dtype=float)
        if x.size != spec.n:
            raise ParametrizationError(f"angle vector has length {x.size}, expected {spec.n}")
        per = spec.angles_per_observable
        out = []
        for chunk in x.reshape(2 * spec.m, per):
            full = np.zeros(self._per_full)
            full[self._free_idx] = chunk
            out.append(ObservableSpec(spec.kind, spec.d, tuple(full)))
        return out[:spec.m], out[spec.m:]

    def tables(self, x: np.ndarray) -> tuple[ProbabilityTable, ProbabilityTable]:
        alice, bob = self.observables(x)
        signal = probability_table(self.spec.state, alice, bob)
        if self._uniform is not None:
            return signal, self._uniform
        return signal, probability_table(self._noise_state, alice, bob)

    def evaluate(self, x: np.ndarray) -> VisibilityResult:
        signal, noise = self.tables(x)
        return critical_visibility(signal, noise, solver=self.solver)

    def __call__(self, x: np.ndarray) -> float:
        res = self.evaluate(x)
        if res.status == SOLVER_FAILURE:
            self.failures += 1
            return 1.0
        return res.v_crit


@dataclass
class OptimizationResult:
    """Best-of-multistart outcome; ``history`` holds one entry per restart
    (NaN where the restart's candidate failed certification)."""

    best_angles: np.ndarray
    best_value: float
    restart_index: int
    iterations: int
    converged: bool
    history: tuple[float, ...]
    failed_restarts: int = 0

    def round_trip(self) -> float:
        return round(self.best_value, 4)


def _as_seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _run_restart(index: int, spec: ObjectiveSpec, entropy: tuple,
                 warm: np.ndarray | None, opts: NmOptions):
    objective = VisibilityObjective(spec)
    rng = np.random.default_rng(np.random.SeedSequence(*entropy))
    x0 = rng.uniform(0.0, 2.0 * np.pi, spec.n)
    if warm is not None:
        x0 = np.asarray(warm, dtype=float)
    try:
        nm = nelder_mead(objective, x0, opts)
        check = objective.evaluate(nm.x)
        if check.status == SOLVER_FAILURE:
            return index, math.nan, None, nm.iterations, False
        return index, check.v_crit, nm.x, nm.iterations, nm.converged
    except OptimizerError:
        return index, math.nan, None, 0, False


def _restart_entry(args):
    return _run_restart(*args)


def minimize_visibility(spec: ObjectiveSpec, restarts: int, seed,
                        *, warm_start: np.ndarray | None = None,
                        nm: NmOptions | None = None, polish: bool = True,
                        threads: int = 1) -> OptimizationResult:
    """Multistart Nelder-Mead over angle vectors drawn uniformly in [0, 2*pi).

    The RNG is split per restart from the master seed, so the result does not
    depend on scheduling; ``warm_start`` replaces the first restart's random
    start.  Restarts whose best point fails strict LP certification are
    recorded as NaN in the history and excluded from the minimum; if every
    restart fails, :class:`OptimizerError` is raised.  When ``polish`` is on,
    a final small-step Nelder-Mead run refines the winning angles.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    opts = nm or NmOptions()
    children = _as_seedseq(seed).spawn(restarts)
    jobs = []
    for r in range(restarts):
        warm = warm_start if (r == 0 and warm_start is not None) else None
        jobs.append((r, spec, tuple(children[r].entropy) + tuple(children[r].spawn_key),
                     warm, opts))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_restart_entry, jobs))
    else:
        outcomes = [_restart_entry(j) for j in jobs]
    outcomes.sort(key=lambda t: t[0])

    history = tuple(o[1] for o in outcomes)
    total_iters = sum(o[3] for o in outcomes)
    failed = sum(1 for o in outcomes if o[2] is None)
    valid = [o for o in outcomes if o[2] is not None]
    if not valid:
        raise OptimizerError(f"all {restarts} restarts failed")
    best = min(valid, key=lambda t: (t[1], t[0]))
    best_idx, best_val, best_x, _, best_conv = best

    if polish:
        objective = VisibilityObjective(spec)
        refined = nelder_mead(objective, best_x, replace(opts, step=0.02))
        total_iters += refined.iterations
        strict = objective.evaluate(refined.x)
        if strict.status != SOLVER_FAILURE and strict.v_crit < best_val:
            best_val = strict.v_crit
            best_x = refined.x
            best_conv = refined.converged
    return OptimizationResult(np.asarray(best_x), float(best_val), best_idx,
                              total_iters, best_conv, history, failed)


@dataclass
class ScanPoint:
    """One grid point of a family scan."""

    key: tuple[float, ...]
    value: float = math.nan
    angles: np.ndarray | None = None
    restarts: int = 0
    error: str | None = None
    iterations: int = 0


def scan_family(states: Sequence[tuple[tuple[float, ...], QuditState]],
                template: ObjectiveSpec, restarts: int, seed,
                *, warm_start: bool = True, nm: NmOptions | None = None,
                polish: bool = True, threads: int = 1,
                progress: Callable[[ScanPoint], None] | None = None) -> list[ScanPoint]:
    """Run ``minimize_visibility`` over a family of states.

    ``states`` maps grid keys (e.g. ``(alpha_deg, beta_deg)``) to states; the
    template supplies noise/kind/m.  With ``warm_start`` on, each point's
    first restart starts from the best angles of the nearest already-scanned
    key (Euclidean distance), which tracks the optimum along a grid; the
    remaining restarts stay random.  Failures are recorded per point and the
    scan continues.  Deterministic for a fixed seed and state order.
    """
    master = _as_seedseq(seed)
    children = master.spawn(len(states))
    results: list[ScanPoint] = []
    done: list[tuple[np.ndarray, np.ndarray]] = []  # (key array, best angles)
    for idx, (key, state) in enumerate(states):
        spec = replace(template, state=state)
        warm = None
        if warm_start and done:
            karr = np.asarray(key, dtype=float)
            dists = [float(np.linalg.norm(karr - k)) for k, _ in done]
            warm = done[int(np.argmin(dists))][1]
        point = ScanPoint(key=tuple(float(v) for v in key), restarts=restarts)
        try:
            out = minimize_visibility(spec, restarts, children[idx], warm_start=warm,
                                      nm=nm, polish=polish, threads=threads)
            point.value = out.best_value
            point.angles = out.best_angles
            point.iterations = out.iterations
            if warm_start:
                done.append((np.asarray(key, dtype=float), out.best_angles))
        except OptimizerError as exc:
            point.error = str(exc)
        results.append(point)
        if progress is not None:
            progress(point)
    return results
