"""Measurement unitaries: multiport classes M1/M2/M3 and full U(d).

A measurement device is a d x d unitary U followed by detectors in the
computational basis, so outcome ``a`` fires with amplitude ``(U psi)_a``.
The M-k classes alternate a layer of input phase shifters with an unbiased
d-port beamsplitter (the Fourier transform), k times; the first phase of
every layer is gauge-fixed to zero since a global phase per layer is
unobservable.  ``FULL_UNITARY`` is a Givens-rotation product that covers all
of U(d) with exactly d**2 real parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import DimensionError, ParametrizationError

M1 = "m1"
M2 = "m2"
M3 = "m3"
FULL_UNITARY = "u"

KINDS = (M1, M2, M3, FULL_UNITARY)

_TRITTER_LAYERS = {M1: 1, M2: 2, M3: 3}


def angle_count(kind: str, d: int) -> int:
    """Number of free angles of a ``kind`` observable in dimension d."""
    if kind in _TRITTER_LAYERS:
        return _TRITTER_LAYERS[kind] * (d - 1)
    if kind == FULL_UNITARY:
        return d * d
    raise ParametrizationError(f"unknown observable kind {kind!r}")


@lru_cache(maxsize=None)
def fourier_matrix(d: int) -> np.ndarray:
    """Unbiased multiport transformation U[k,l] = exp(2*pi*i*k*l/d)/sqrt(d).

    Raises ``DimensionError`` for d < 2.  The result is cached and read-only.
    """
    if d < 2:
        raise DimensionError(f"Fourier matrix needs dimension >= 2, got {d}")
    k = np.arange(d)
    mat = np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def _givens_pairs(d: int) -> tuple[tuple[int, int], ...]:
    # Mode pairs in the order produced by column-wise Givens elimination;
    # composing in this same order (then a diagonal phase layer) is onto U(d).
    pairs = []
    for col in range(d - 1):
        for row in range(d - 1, col, -1):
            pairs.append((row - 1, row))
    return tuple(pairs)


def _rotation_block(theta: float, phi: float) -> np.ndarray:
    c = np.cos(theta)
    s = np.sin(theta)
    e = np.exp(1j * phi)
    return np.array([[c, -s / e], [s * e, c]])


def givens_unitary(d: int, angles: np.ndarray) -> np.ndarray:
    """Compose a U(d) element from d**2 angles.

    Layout: ``d*(d-1)/2`` mode-pair rotations of two angles each
    (rotation angle, relative phase), followed by ``d`` output phases.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.size != d * d:
        raise ParametrizationError(
            f"U({d}) takes {d * d} angles, got {angles.size}")
    pairs = _givens_pairs(d)
    npairs = len(pairs)
    mat = np.diag(np.exp(1j * angles[2 * npairs:])).astype(complex)
    # Left-multiplying by a two-mode block touches two rows only.
    for idx in range(npairs - 1, -1, -1):
        p, q = pairs[idx]
        block = _rotation_block(angles[2 * idx], angles[2 * idx + 1])
        mat[[p, q], :] = block @ mat[[p, q], :]
    return mat


def _phase_layer(d: int, phases: np.ndarray) -> np.ndarray:
    # diag(1, e^{i phi_1}, ..., e^{i phi_{d-1}}): first phase gauge-fixed.
    out = np.empty(d, dtype=complex)
    out[0] = 1.0
    out[1:] = np.exp(1j * phases)
    return out


def multiport_unitary(d: int, layers: int, angles: np.ndarray) -> np.ndarray:
    """Alternating phase-layer / multiport product with ``layers`` blocks.

    ``angles`` holds ``layers`` consecutive groups of d-1 phases; the group
    applied first (input side) comes first.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.size != layers * (d - 1):
        raise ParametrizationError(
            f"M{layers} in dimension {d} takes {layers * (d - 1)} angles, got {angles.size}")
    fourier = fourier_matrix(d)
    mat = None
    for layer in range(layers):
        phases = _phase_layer(d, angles[layer * (d - 1):(layer + 1) * (d - 1)])
        if mat is None:
            mat = fourier * phases[np.newaxis, :]
        else:
            mat = (fourier * phases[np.newaxis, :]) @ mat
    return mat


@dataclass(frozen=True)
class ObservableSpec:
    """A measurement basis: parametrization kind plus angle vector.

    ``kind`` is one of ``m1``, ``m2``, ``m3`` (multiport classes) or ``u``
    (full U(d)); the angle-vector length must match ``angle_count(kind, d)``.
    """

    kind: str
    d: int
    angles: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParametrizationError(f"unknown observable kind {self.kind!r}")
        if self.d < 2:
            raise DimensionError(f"local dimension must be >= 2, got {self.d}")
        expected = angle_count(self.kind, self.d)
        if len(self.angles) != expected:
            raise ParametrizationError(
                f"kind {self.kind!r} at d={self.d} takes {expected} angles, "
                f"got {len(self.angles)}")
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))


def compile_observable(spec: ObservableSpec) -> np.ndarray:
    """Compile a spec into its d x d measurement unitary."""
    angles = np.asarray(spec.angles, dtype=float)
    if spec.kind == FULL_UNITARY:
        return givens_unitary(spec.d, angles)
    return multiport_unitary(spec.d, _TRITTER_LAYERS[spec.kind], angles)
