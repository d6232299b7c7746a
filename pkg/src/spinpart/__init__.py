"""A spin J as 2J exchange-symmetric qubits: pair extraction, pair Husimi
functions, entanglement witnesses, spin-1 pair tomography and pair loss by
spontaneous emission."""

from .angular import AngularMomentum, Direction, SpinState, clebsch_gordan, rotation_unitary, spin_operators
from .partition import PairState, pair_husimi, reduced_pair_state
from .states import OatParams, cat_state, coherent, dicke, w_state

__version__ = "0.1.0"

__all__ = [
    "AngularMomentum",
    "Direction",
    "OatParams",
    "PairState",
    "SpinState",
    "cat_state",
    "clebsch_gordan",
    "coherent",
    "dicke",
    "pair_husimi",
    "reduced_pair_state",
    "rotation_unitary",
    "spin_operators",
    "w_state",
]
