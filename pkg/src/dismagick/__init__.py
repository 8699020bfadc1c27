"""Lower the magic and entanglement of many-body states with two-qubit gates.

Statevectors use the continuous dismagicker with exact M2; matrix product
states use the discrete Clifford+Rz search with Pauli-sampled M2.  Both are
followed by the exhaustive Clifford disentangler.
"""
from .dismagicker import (NelderMeadConfig, generator_to_unitary, optimize_dismagicker_continuous,
                          optimize_dismagicker_discrete)
from .disentangler import best_clifford_disentangler
from .dmrg import (MPO, conjugate_mpo, heisenberg_mpo, heisenberg_pipeline, reference_energy,
                   relative_error, two_site_dmrg)
from .kernels import BACKEND
from .mps import MPS, TruncationConfig, from_statevector, to_statevector
from .pauli_clifford import PauliString, TwoQubitGate, enumerate_two_qubit_cliffords
from .sre import exact_m2, sampled_m2, stab_fidelity_lower_bound
from .statevector import Statevector, prepare_benchmark_state
from .sweep import CliffordOnly, Joint, Sequential, SweepConfig, run_sweeps

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CliffordOnly", "Joint", "MPO", "MPS", "NelderMeadConfig", "PauliString",
    "Sequential", "Statevector", "SweepConfig", "TruncationConfig", "TwoQubitGate",
    "best_clifford_disentangler", "conjugate_mpo", "enumerate_two_qubit_cliffords", "exact_m2",
    "from_statevector", "generator_to_unitary", "heisenberg_mpo", "heisenberg_pipeline",
    "optimize_dismagicker_continuous", "optimize_dismagicker_discrete",
    "prepare_benchmark_state", "reference_energy", "relative_error", "run_sweeps",
    "sampled_m2", "stab_fidelity_lower_bound", "to_statevector", "two_site_dmrg",
]
