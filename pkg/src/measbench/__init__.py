"""Finite-dimensional quantum measurement sequences, paths and hidden-variable checks."""

from ._version import __version__
from .demon import PointerModel, demon_compare, demon_sweep
from .hilbert import (
    HermitianOperator,
    PovmEffect,
    Projector,
    QuantumState,
    Unitary,
    commutator_norm,
    evolve_heisenberg,
    make_density,
    make_state,
    operator_sqrt,
    spectral_decompose,
    unitary_from_hamiltonian,
)
from .lattice import Lattice1D, build_hamiltonian, gaussian_packet, oscillator_spectrum
from .logic import meet, meet_strict, ql_chain_sum_check, ql_sequence_probability
from .paths import (
    PathSpec,
    TimeGrid,
    distance_distribution,
    expected_path,
    joint_region_projector,
    path_distance,
    path_distance_operator,
    path_probability,
)
from .scenarios import ScenarioConfig, list_scenarios, run_scenario, validate_config
from .sequences import (
    MeasurementChain,
    TransitionTable,
    feynman_discrepancy,
    markov_violation_report,
    reduce_state,
    wigner_chain,
)
from .slits import SlitSetup, double_slit_inference
from .spin import (
    SphereModelConfig,
    joint_value_infeasibility,
    quantum_spin_correlation,
    sphere_sample,
    sphere_vs_quantum,
)

__all__ = [
    "HermitianOperator",
    "Lattice1D",
    "MeasurementChain",
    "PathSpec",
    "PointerModel",
    "PovmEffect",
    "Projector",
    "QuantumState",
    "ScenarioConfig",
    "SlitSetup",
    "SphereModelConfig",
    "TimeGrid",
    "TransitionTable",
    "Unitary",
    "__version__",
    "build_hamiltonian",
    "commutator_norm",
    "demon_compare",
    "demon_sweep",
    "distance_distribution",
    "double_slit_inference",
    "evolve_heisenberg",
    "expected_path",
    "feynman_discrepancy",
    "gaussian_packet",
    "joint_region_projector",
    "joint_value_infeasibility",
    "list_scenarios",
    "make_density",
    "make_state",
    "markov_violation_report",
    "meet",
    "meet_strict",
    "operator_sqrt",
    "oscillator_spectrum",
    "path_distance",
    "path_distance_operator",
    "path_probability",
    "ql_chain_sum_check",
    "ql_sequence_probability",
    "quantum_spin_correlation",
    "reduce_state",
    "run_scenario",
    "spectral_decompose",
    "sphere_sample",
    "sphere_vs_quantum",
    "unitary_from_hamiltonian",
    "validate_config",
    "wigner_chain",
]
