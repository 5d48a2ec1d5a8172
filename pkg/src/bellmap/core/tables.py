"""Joint outcome probability tables P(a, b | i, k).

The table of an experiment with m settings per observer and d outcomes per
measurement is the LP input: entry ``P[i, k, a, b]`` is the probability that
Alice's i-th and Bob's k-th measurement yield outcomes a and b.
"""

from __future__ import annotations

import numpy as np

from ..errors import ScenarioError, TableError
from .observables import ObservableSpec, compile_observable
from .states import QuditState

NEGATIVITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-9


class ProbabilityTable:
    """Immutable (m, m, d, d) array of setting-pair outcome probabilities.

    Construction clamps round-off negatives within ``NEGATIVITY_TOL`` to zero
    and rejects anything more negative; every (i, k) slice must sum to one
    within ``NORMALIZATION_TOL``.
    """

    __slots__ = ("m", "d", "probs")

    def __init__(self, probs: np.ndarray):
        arr = np.array(probs, dtype=float)
        if arr.ndim != 4 or arr.shape[0] != arr.shape[1] or arr.shape[2] != arr.shape[3]:
            raise TableError(f"table must have shape (m, m, d, d), got {arr.shape}")
        low = arr.min()
        if low < -NEGATIVITY_TOL:
            raise TableError(f"probability entry {low:g} below -{NEGATIVITY_TOL:g}")
        np.clip(arr, 0.0, None, out=arr)
        sums = arr.sum(axis=(2, 3))
        worst = np.abs(sums - 1.0).max()
        if worst > NORMALIZATION_TOL:
            raise TableError(f"setting-pair sums deviate from 1 by {worst:g}")
        arr.setflags(write=False)
        self.m = arr.shape[0]
        self.d = arr.shape[2]
        self.probs = arr

    def __eq__(self, other) -> bool:
        return (isinstance(other, ProbabilityTable)
                and self.m == other.m and self.d == other.d
                and np.array_equal(self.probs, other.probs))

    def __repr__(self) -> str:  # pragma: no cover
        return f"ProbabilityTable(m={self.m}, d={self.d})"


def probability_table(state: QuditState,
                      alice: list[ObservableSpec],
                      bob: list[ObservableSpec]) -> ProbabilityTable:
    """Quantum probabilities of all setting pairs for the given observables.

    For measurement unitaries U_i (Alice) and V_k (Bob),
    ``P[i, k, a, b] = <ab| (U_i x V_k) rho (U_i x V_k)^dag |ab>``;
    pure states use the equivalent amplitude form.
    """
    if not alice or not bob:
        raise ScenarioError("need at least one observable per party")
    if len(alice) != len(bob):
        raise ScenarioError(
            f"setting counts differ: {len(alice)} (Alice) vs {len(bob)} (Bob)")
    d = state.d
    for spec in (*alice, *bob):
        if spec.d != d:
            raise ScenarioError(
                f"observable dimension {spec.d} does not match state dimension {d}")
    m = len(alice)
    ua = [compile_observable(s) for s in alice]
    vb = [compile_observable(s) for s in bob]
    out = np.empty((m, m, d, d))
    if state.is_pure:
        psi = state.vector.reshape(d, d)
        for i in range(m):
            left = ua[i] @ psi
            for k in range(m):
                amp = left @ vb[k].T
                out[i, k] = amp.real ** 2 + amp.imag ** 2
    else:
        rho = state.density()
        for i in range(m):
            for k in range(m):
                w = np.kron(ua[i], vb[k])
                diag = np.einsum("ij,jk,ik->i", w, rho, w.conj()).real
                out[i, k] = diag.reshape(d, d)
    return ProbabilityTable(out)


def uniform_table(m: int, d: int) -> ProbabilityTable:
    """Table of the maximally mixed state: every entry 1/d**2."""
    return ProbabilityTable(np.full((m, m, d, d), 1.0 / (d * d)))


def mix_tables(signal: ProbabilityTable, noise: ProbabilityTable,
               v: float) -> ProbabilityTable:
    """Entrywise convex combination ``v * signal + (1 - v) * noise``."""
    if (signal.m, signal.d) != (noise.m, noise.d):
        raise ScenarioError(
            f"table shapes differ: ({signal.m},{signal.d}) vs ({noise.m},{noise.d})")
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    return ProbabilityTable(v * signal.probs + (1.0 - v) * noise.probs)
