"""Digital quantum simulation of spin chains, spin-boson chains and three-body spin models."""

from .hilbert import (
    DensityMatrix,
    Operator,
    PureState,
    SpaceShape,
    apply,
    conjugate,
    expm_hermitian,
    ladder,
    pauli,
    spin_ladder,
)
from .gates import GateKind, GateSequence, phase_distance
from .config import ExperimentConfig, preset
from .experiments import run
from .hamiltonians import TermList
from .lindblad import Segment, evolve_master
from .metrics import fidelity_pure, fidelity_trace
from .trotter import TrotterPlan, trotter_unitary

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "ExperimentConfig",
    "GateKind",
    "GateSequence",
    "Operator",
    "PureState",
    "Segment",
    "SpaceShape",
    "TermList",
    "TrotterPlan",
    "apply",
    "conjugate",
    "evolve_master",
    "expm_hermitian",
    "fidelity_pure",
    "fidelity_trace",
    "ladder",
    "pauli",
    "phase_distance",
    "preset",
    "run",
    "spin_ladder",
    "trotter_unitary",
]
