"""Adiabatically-inspired predictor-corrector methods for molecular ground states."""

from .paulis import Observable, PauliString, PauliTerm, axpy, multiply, to_dense_matrix
from .simulator import (
    ControlledZ,
    PauliRotation,
    StateVector,
    apply_gate,
    expectation,
    init_basis,
    init_plus,
)
from .ansatz import ParamCircuit, build_hea, build_uccsd, hf_params_for_hea
from .schedules import Schedule, make_schedule
from .derivatives import EnergyFunctional
from .optimizers import LbfgsConfig, NsgdConfig, OptimizerResult, lbfgs_minimize, nsgd_minimize, vqe
from .continuation import ContinuationProblem, MethodConfig, RunTrace, run, method_by_name
from .chemistry import (
    IntegralData,
    fock_hamiltonian,
    hf_bitstring,
    jordan_wigner,
    parse_fcidump,
    qubit_hamiltonian,
    transverse_hamiltonian,
)
from .exact import gap_profile, ground_state, ratio_diagnostic

__version__ = "0.1.0"

__all__ = [
    "Observable", "PauliString", "PauliTerm", "axpy", "multiply", "to_dense_matrix",
    "ControlledZ", "PauliRotation", "StateVector", "apply_gate", "expectation",
    "init_basis", "init_plus",
    "ParamCircuit", "build_hea", "build_uccsd", "hf_params_for_hea",
    "Schedule", "make_schedule",
    "EnergyFunctional",
    "LbfgsConfig", "NsgdConfig", "OptimizerResult", "lbfgs_minimize", "nsgd_minimize", "vqe",
    "ContinuationProblem", "MethodConfig", "RunTrace", "run", "method_by_name",
    "IntegralData", "fock_hamiltonian", "hf_bitstring", "jordan_wigner",
    "parse_fcidump", "qubit_hamiltonian", "transverse_hamiltonian",
    "gap_profile", "ground_state", "ratio_diagnostic",
]
