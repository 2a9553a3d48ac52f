"""Parameterized circuit programs: hardware-efficient ansatz and UCCSD.

A ParamCircuit is an ordered gate program whose entries are either fixed
gates or parameter slots.  A slot carries the rotation axis and a
coefficient multiplier c, so binding theta turns it into
PauliRotation(axis, c * theta[slot]).  Slots may be shared by several
entries (UCCSD shares one slot across all Pauli strings of an excitation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chemistry import FermionOperator, jordan_wigner
from .errors import ContractError, DimensionError
from .paulis import PauliString
from .simulator import ControlledZ, Gate, PauliRotation, StateVector, apply_gate, init_basis


@dataclass(frozen=True)
class SlotGate:
    slot: int
    axis: PauliString
    coeff: float  # bound angle = coeff * theta[slot]

    def __post_init__(self):
        if not (math.isfinite(self.coeff) and self.coeff != 0.0):
            raise ValueError("slot coefficient must be finite and nonzero")


@dataclass(frozen=True)
class FixedGate:
    gate: Gate


CircuitEntry = SlotGate | FixedGate


class ParamCircuit:
    """Immutable ordered gate program with parameter slots."""

    __slots__ = ("n_qubits", "entries", "n_params", "slot_positions")

    def __init__(self, n_qubits: int, entries, n_params: int):
        entries = tuple(entries)
        positions: dict[int, list[int]] = {j: [] for j in range(n_params)}
        for pos, e in enumerate(entries):
            if isinstance(e, SlotGate):
                if not (0 <= e.slot < n_params):
                    raise ValueError(f"slot index {e.slot} out of range")
                positions[e.slot].append(pos)
        for j, ps in positions.items():
            if not ps:
                raise ValueError(f"slot {j} never appears in the circuit")
        self.n_qubits = n_qubits
        self.entries = entries
        self.n_params = n_params
        self.slot_positions = {j: tuple(ps) for j, ps in positions.items()}

    def bind(self, theta) -> list[Gate]:
        """Pure binding: slots become PauliRotation(axis, c * theta[slot])."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise DimensionError(f"theta length {theta.shape} != n_params {self.n_params}")
        gates: list[Gate] = []
        for e in self.entries:
            if isinstance(e, FixedGate):
                gates.append(e.gate)
            else:
                gates.append(PauliRotation(e.axis, e.coeff * float(theta[e.slot])))
        return gates

    def prepare_state(self, theta, angle_offsets: dict[int, float] | None = None) -> StateVector:
        """Run the bound circuit on |0...0>.

        `angle_offsets` maps entry positions to additive offsets applied to
        that gate's bound angle; the parameter-shift rules shift individual
        gate angles this way, which stays exact for shared slots.
        """
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise DimensionError(f"theta length {theta.shape} != n_params {self.n_params}")
        state = init_basis(self.n_qubits, "0" * self.n_qubits)
        for pos, e in enumerate(self.entries):
            if isinstance(e, FixedGate):
                apply_gate(state, e.gate)
            else:
                angle = e.coeff * float(theta[e.slot])
                if angle_offsets:
                    angle += angle_offsets.get(pos, 0.0)
                apply_gate(state, PauliRotation(e.axis, angle))
        return state


def bind(pc: ParamCircuit, theta) -> list[Gate]:
    return pc.bind(theta)


def build_hea(n_qubits: int, layers: int) -> ParamCircuit:
    """Hardware-efficient ansatz: `layers` blocks of [Ry,Rz per qubit; CZ on
    all pairs i<j] plus a final Ry,Rz layer.  n_params = 2n(layers+1)."""
    if n_qubits < 2:
        raise ContractError("HEA needs n_qubits >= 2 for the entangler")
    if layers < 1:
        raise ContractError("layers must be >= 1")
    entries: list[CircuitEntry] = []
    slot = 0

    def rotation_layer():
        nonlocal slot
        for q in range(n_qubits):
            entries.append(SlotGate(slot, PauliString.single(n_qubits, q, "Y"), 1.0))
            slot += 1
            entries.append(SlotGate(slot, PauliString.single(n_qubits, q, "Z"), 1.0))
            slot += 1

    for _ in range(layers):
        rotation_layer()
        for i in range(n_qubits):
            for j in range(i + 1, n_qubits):
                entries.append(FixedGate(ControlledZ(i, j)))
    rotation_layer()
    return ParamCircuit(n_qubits, entries, slot)


def hf_params_for_hea(n_qubits: int, layers: int, reference_bits: str) -> np.ndarray:
    """Theta preparing `reference_bits` through build_hea: first-layer Ry = pi
    on occupied qubits, all else zero.  CZ acts as a phase on basis states,
    so the output matches the reference up to global phase (checked)."""
    if len(reference_bits) != n_qubits:
        raise DimensionError("reference bit count != n_qubits")
    theta = np.zeros(2 * n_qubits * (layers + 1))
    for q, bit in enumerate(reference_bits):
        if bit == "1":
            theta[2 * q] = math.pi
    circuit = build_hea(n_qubits, layers)
    fid = circuit.prepare_state(theta).fidelity_with_basis(reference_bits)
    if abs(fid - 1.0) > 1e-10:
        raise ContractError(f"HF-parameter construction fidelity {fid} != 1")
    return theta


def plus_params_for_hea(n_qubits: int, layers: int) -> np.ndarray:
    """Theta preparing |+...+> exactly through build_hea.

    All rotations zero except the final Ry layer at pi/2: the zeroed early
    layers leave |0...0> untouched (CZ is diagonal and trivial there), and
    the terminal Ry(pi/2) layer rotates every qubit onto |+>.
    """
    theta = np.zeros(2 * n_qubits * (layers + 1))
    final = 2 * n_qubits * layers
    for q in range(n_qubits):
        theta[final + 2 * q] = math.pi / 2.0
    circuit = build_hea(n_qubits, layers)
    state = circuit.prepare_state(theta)
    overlap = abs(np.sum(state.amps)) / 2 ** (n_qubits / 2.0)
    if abs(overlap - 1.0) > 1e-10:
        raise ContractError(f"plus-state construction overlap {overlap} != 1")
    return theta


def enumerate_excitations(n_spin_orbitals: int, reference_bits: str):
    """Spin-conserving singles and Sz-conserving doubles for a reference
    determinant, singles first, each in lexicographic index order."""
    occ = [i for i, b in enumerate(reference_bits) if b == "1"]
    vir = [i for i, b in enumerate(reference_bits) if b == "0"]
    singles = [
        (i, a) for i in occ for a in vir if i % 2 == a % 2
    ]
    doubles = []
    for ii, i in enumerate(occ):
        for j in occ[ii + 1:]:
            for ai, a in enumerate(vir):
                for b in vir[ai + 1:]:
                    if (i % 2 + j % 2) == (a % 2 + b % 2):
                        doubles.append((i, j, a, b))
    return singles, doubles


def build_uccsd(n_spatial_orbitals: int, n_electrons: int, reference_bits: str) -> ParamCircuit:
    """Single-Trotter-step UCCSD over 2M spin-orbital qubits.

    Each excitation contributes one shared parameter slot; its anti-Hermitian
    generator T - T† is JW-mapped into Pauli strings with imaginary
    coefficients, and each string becomes a rotation entry with coefficient
    multiplier 2*Im(coeff).  Fixed X rotations by pi prepare the reference.
    """
    n_qubits = 2 * n_spatial_orbitals
    if len(reference_bits) != n_qubits:
        raise DimensionError("reference bit count != 2 * n_spatial_orbitals")
    if reference_bits.count("1") != n_electrons:
        raise ContractError("reference occupation != n_electrons")
    if not 0 < n_electrons < n_qubits:
        raise ContractError("electron count infeasible for this orbital space")

    entries: list[CircuitEntry] = []
    for q, bit in enumerate(reference_bits):
        if bit == "1":
            entries.append(FixedGate(PauliRotation(PauliString.single(n_qubits, q, "X"), math.pi)))

    singles, doubles = enumerate_excitations(n_qubits, reference_bits)
    slot = 0
    for exc in list(singles) + list(doubles):
        if len(exc) == 2:
            i, a = exc
            t = FermionOperator.term([(a, True), (i, False)])
        else:
            i, j, a, b = exc
            t = FermionOperator.term([(a, True), (b, True), (j, False), (i, False)])
        generator = t - t.dagger()
        image = jordan_wigner(generator, n_qubits)
        for term in image.terms:
            if abs(term.coeff.real) > 1e-12:
                raise ContractError("excitation generator mapped to a real coefficient")
            entries.append(SlotGate(slot, term.string, 2.0 * term.coeff.imag))
        slot += 1
    return ParamCircuit(n_qubits, entries, slot)
