import numpy as np
import pytest

from adiapath.paulis import Observable, PauliString, PauliTerm


def random_pauli_string(rng, n_qubits: int) -> PauliString:
    full = (1 << n_qubits) - 1
    return PauliString(n_qubits, int(rng.integers(0, full + 1)), int(rng.integers(0, full + 1)))


def random_hermitian_observable(rng, n_qubits: int, n_terms: int = 8) -> Observable:
    terms = [
        PauliTerm(float(rng.normal()), random_pauli_string(rng, n_qubits))
        for _ in range(n_terms)
    ]
    return Observable(n_qubits, terms).simplify()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
