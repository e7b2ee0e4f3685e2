"""Quadratic Bell-type entanglement witness for 2x2 and 2x3 systems.

The witness I = Y1^2 + Y2^2 - Y3^2 is built from local POVM statistics;
a positive maximum over local unitaries certifies entanglement.
"""

from .linalg import QUBIT_QUBIT, QUBIT_QUTRIT, Dims
from .optimize import OptimizerConfig, classify, maximize_i_ph
from .sampler import estimate_i_ph, sample_shots
from .states import DensityMatrix, bell_state, load_state, mems, save_state, werner
from .witness import i_ph, joint_probabilities, y_triple

__all__ = [
    "QUBIT_QUBIT", "QUBIT_QUTRIT", "Dims",
    "OptimizerConfig", "classify", "maximize_i_ph",
    "estimate_i_ph", "sample_shots",
    "DensityMatrix", "bell_state", "load_state", "mems", "save_state", "werner",
    "i_ph", "joint_probabilities", "y_triple",
]
__version__ = "0.1.0"
