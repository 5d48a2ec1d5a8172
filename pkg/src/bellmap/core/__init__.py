"""States, measurement unitaries, noise models and probability tables."""

from .noise import CUSTOM, DEPHASING, PRODUCT, VARIANTS, WHITE, NoiseModel, noise_state
from .observables import (FULL_UNITARY, KINDS, M1, M2, M3, ObservableSpec, angle_count,
                          compile_observable, fourier_matrix, givens_unitary,
                          multiport_unitary)
from .states import (QuditState, read_density_matrix, reduced_state,
                     validate_density_matrix, write_density_matrix)
from .tables import ProbabilityTable, mix_tables, probability_table, uniform_table

__all__ = [
    "CUSTOM", "DEPHASING", "PRODUCT", "VARIANTS", "WHITE", "NoiseModel", "noise_state",
    "FULL_UNITARY", "KINDS", "M1", "M2", "M3", "ObservableSpec", "angle_count",
    "compile_observable", "fourier_matrix", "givens_unitary", "multiport_unitary",
    "QuditState", "read_density_matrix", "reduced_state", "validate_density_matrix",
    "write_density_matrix", "ProbabilityTable", "mix_tables", "probability_table",
    "uniform_table",
]
