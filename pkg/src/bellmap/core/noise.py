"""Noise models that interpolate the measured state toward classicality.

The admixture ``v * rho_signal + (1 - v) * rho_noise`` is the family whose
largest locally-modelable ``v`` the LP computes.  Supported noise states:

* white -- maximally mixed, identity / d**2;
* product -- tensor product of the signal's reduced states;
* dephasing -- the diagonal part of the signal in the computational basis;
* custom -- any user-supplied density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NoiseError, StateError
from .states import QuditState, reduced_state, validate_density_matrix

WHITE = "white"
PRODUCT = "product"
DEPHASING = "dephasing"
CUSTOM = "custom"

VARIANTS = (WHITE, PRODUCT, DEPHASING, CUSTOM)


@dataclass(frozen=True)
class NoiseModel:
    """Noise variant, with the noise density matrix for ``custom``."""

    variant: str
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise NoiseError(f"unknown noise variant {self.variant!r}")
        if self.variant == CUSTOM:
            if self.matrix is None:
                raise NoiseError("custom noise requires a density matrix")
            mat = np.ascontiguousarray(np.asarray(self.matrix, dtype=complex))
            try:
                validate_density_matrix(mat)
            except StateError as exc:
                raise NoiseError(f"invalid custom noise matrix: {exc}") from exc
            mat.setflags(write=False)
            object.__setattr__(self, "matrix", mat)
        elif self.matrix is not None:
            raise NoiseError(f"variant {self.variant!r} takes no matrix")


def noise_state(model: NoiseModel, signal: QuditState) -> QuditState:
    """Compile the noise model against a signal state into a mixed state."""
    d = signal.d
    if model.variant == WHITE:
        return QuditState.mixed(np.eye(d * d, dtype=complex) / (d * d), d)
    if model.variant == PRODUCT:
        rho_a = reduced_state(signal, "A")
        rho_b = reduced_state(signal, "B")
        return QuditState.mixed(np.kron(rho_a, rho_b), d)
    if model.variant == DEPHASING:
        return QuditState.mixed(np.diag(np.diag(signal.density()).real).astype(complex), d)
    mat = model.matrix
    if mat.shape != (d * d, d * d):
        raise NoiseError(
            f"custom noise has shape {mat.shape}, signal needs {(d * d, d * d)}")
    return QuditState.mixed(mat, d)
