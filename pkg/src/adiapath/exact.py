"""Dense exact-diagonalization oracle: FCI references, spectra, gap profiles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ContractError
from .paulis import DENSE_QUBIT_LIMIT, Observable, axpy, to_dense_matrix
from .schedules import Schedule

DEGENERACY_TOL = 1e-9  # hartree


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray      # ascending
    ground_vector: np.ndarray
    degeneracy_tol: float = DEGENERACY_TOL


def _dense_checked(obs: Observable) -> np.ndarray:
    if obs.n_qubits > DENSE_QUBIT_LIMIT:
        raise CapacityError(f"exact solver refused for n_qubits={obs.n_qubits}")
    return to_dense_matrix(obs.real_coeffs())


def spectrum(obs: Observable) -> SpectrumResult:
    mat = _dense_checked(obs)
    vals, vecs = np.linalg.eigh(mat)
    v0 = vecs[:, 0]
    residual = np.linalg.norm(mat @ v0 - vals[0] * v0)
    if residual > 1e-8:
        raise ContractError(f"eigenvector residual {residual:g} > 1e-8")
    return SpectrumResult(vals, v0)


def ground_state(obs: Observable) -> tuple[float, np.ndarray]:
    res = spectrum(obs)
    return float(res.eigenvalues[0]), res.ground_vector


def ground_energy(obs: Observable) -> float:
    return ground_state(obs)[0]


def _gap(vals: np.ndarray, tol: float) -> float:
    above = vals[vals > vals[0] + tol]
    return float(above[0] - vals[0]) if above.size else 0.0


def gap_profile(h0: Observable, h1: Observable, schedule: Schedule,
                resolution: int) -> list[tuple[float, float, float]]:
    """(t, s(t), gap) on a uniform grid; gap is the first eigenvalue strictly
    above the ground energy plus the degeneracy tolerance."""
    if resolution < 2:
        raise ContractError("resolution must be >= 2")
    out = []
    for t in np.linspace(0.0, 1.0, resolution):
        s = schedule.s(float(t))
        mat = _dense_checked(axpy(1.0 - s, h0, s, h1))
        vals = np.linalg.eigvalsh(mat)
        out.append((float(t), float(s), _gap(vals, DEGENERACY_TOL)))
    return out


def ratio_diagnostic(h0: Observable, h1: Observable, schedule: Schedule,
                     resolution: int) -> tuple[float, float]:
    """Adiabatic-condition diagnostic: grid supremum of
    sdot(t) * ||H1 - H0||_2 / gap(s(t))^2 and its argmax t."""
    diff_norm = float(np.max(np.abs(np.linalg.eigvalsh(_dense_checked(axpy(-1.0, h0, 1.0, h1))))))
    best_val, best_t = 0.0, 0.0
    for t, _s, g in gap_profile(h0, h1, schedule, resolution):
        if g <= 0.0:
            continue
        val = schedule.sdot(t) * diff_norm / g ** 2
        if val > best_val:
            best_val, best_t = val, t
    return best_val, best_t


def gap_profile_csv(rows) -> str:
    out = ["t,s,gap"]
    out += [f"{t:.12g},{s:.12g},{g:.12g}" for t, s, g in rows]
    return "\n".join(out) + "\n"
