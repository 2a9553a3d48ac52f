"""Noiseless dense statevector simulation and exact expectation values.

Qubit ordering is little-endian: qubit 0 is the least-significant bit of
the amplitude index.  All parameterized rotations use the half-angle
convention exp(-i*theta/2 * P) for a Pauli-string axis P, so P^2 = I gives
the closed form cos(theta/2)*psi - i*sin(theta/2)*(P psi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError, DimensionError
from .paulis import Observable, PauliString, string_action


@dataclass
class StateVector:
    """2^n complex amplitudes, single-owner, mutated in place by gates."""

    n_qubits: int
    amps: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def fidelity_with_basis(self, bits: str) -> float:
        """|<bits|psi>|, bit i of the string addressing qubit i."""
        return abs(self.amps[_bits_to_index(bits)])


@dataclass(frozen=True)
class PauliRotation:
    axis: PauliString
    angle: float

    def __post_init__(self):
        if self.axis.is_identity:
            raise ValueError("rotation axis must be non-identity")


@dataclass(frozen=True)
class ControlledZ:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("control and target must differ")


Gate = PauliRotation | ControlledZ


def _bits_to_index(bits: str) -> int:
    idx = 0
    for i, b in enumerate(bits):
        if b not in "01":
            raise ValueError(f"bad bit {b!r}")
        idx |= (b == "1") << i
    return idx


def init_basis(n_qubits: int, bits: str) -> StateVector:
    """Computational basis state; bit i of `bits` sets qubit i."""
    if len(bits) != n_qubits:
        raise DimensionError("bit string length != n_qubits")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[_bits_to_index(bits)] = 1.0
    return StateVector(n_qubits, amps)


def init_plus(n_qubits: int) -> StateVector:
    """Uniform |+...+> state, all amplitudes 2^(-n/2)."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    dim = 1 << n_qubits
    return StateVector(n_qubits, np.full(dim, dim ** -0.5, dtype=complex))


@lru_cache(maxsize=4096)
def _cz_indices(n_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits)
    sel = idx[((idx >> control) & 1).astype(bool) & ((idx >> target) & 1).astype(bool)]
    sel.setflags(write=False)
    return sel


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate in place and return the state."""
    n = state.n_qubits
    if isinstance(gate, PauliRotation):
        if gate.axis.n_qubits != n:
            raise DimensionError("gate axis qubit count mismatch")
        perm, phase = string_action(n, gate.axis.x_mask, gate.axis.z_mask)
        c = math.cos(gate.angle / 2.0)
        s = math.sin(gate.angle / 2.0)
        psi = state.amps
        state.amps = c * psi - (1j * s) * (phase * psi[perm])
        return state
    if isinstance(gate, ControlledZ):
        if not (0 <= gate.control < n and 0 <= gate.target < n):
            raise IndexError("ControlledZ qubit index out of range")
        state.amps[_cz_indices(n, gate.control, gate.target)] *= -1.0
        return state
    raise TypeError(f"unknown gate {gate!r}")


def run_gates(state: StateVector, gates) -> StateVector:
    for g in gates:
        apply_gate(state, g)
    return state


def expectation(state: StateVector, obs: Observable) -> float:
    """<psi|obs|psi> evaluated term by term; obs must be Hermitian."""
    if obs.n_qubits != state.n_qubits:
        raise DimensionError("observable qubit count mismatch")
    if not obs.is_hermitian:
        raise ContractError("expectation requires a Hermitian observable")
    psi = state.amps
    val = 0.0 + 0.0j
    for t in obs.terms:
        perm, phase = string_action(state.n_qubits, t.string.x_mask, t.string.z_mask)
        val += t.coeff * np.vdot(psi, phase * psi[perm])
    if abs(val.imag) > 1e-10:
        raise ContractError(f"imaginary expectation residue {val.imag:g}")
    return float(val.real)


def expectation_dense(state: StateVector, mat: np.ndarray) -> float:
    """Quadratic form against a cached dense Hermitian matrix."""
    val = np.vdot(state.amps, mat @ state.amps)
    if abs(val.imag) > 1e-10:
        raise ContractError(f"imaginary expectation residue {val.imag:g}")
    return float(val.real)
