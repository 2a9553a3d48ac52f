"""Restricted Hartree-Fock with DIIS convergence acceleration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ScfError(RuntimeError):
    pass


@dataclass
class ScfResult:
    energy_total: float       # electronic + nuclear repulsion
    energy_electronic: float
    mo_coefficients: np.ndarray  # columns are MOs, AO x MO
    mo_energies: np.ndarray
    density: np.ndarray
    converged: bool
    iterations: int


def _fock(h_core, eri, density):
    # chemists' notation: J_pq = (pq|rs) D_rs, K_pq = (pr|qs) D_rs
    j = np.einsum("pqrs,rs->pq", eri, density)
    k = np.einsum("prqs,rs->pq", eri, density)
    return h_core + j - 0.5 * k


def rhf(s, t, v, eri, n_electrons: int, e_nuc: float = 0.0,
        max_iter: int = 200, conv: float = 1e-10, diis_size: int = 8) -> ScfResult:
    if n_electrons % 2:
        raise ScfError("RHF needs an even electron count")
    n_occ = n_electrons // 2
    h_core = t + v

    svals, svecs = np.linalg.eigh(s)
    if np.min(svals) < 1e-10:
        raise ScfError("overlap matrix near-singular")
    x = svecs @ np.diag(svals ** -0.5) @ svecs.T

    def densify(fock):
        fp = x.T @ fock @ x
        eps, cp = np.linalg.eigh(fp)
        c = x @ cp
        occ = c[:, :n_occ]
        return 2.0 * occ @ occ.T, c, eps

    density, c, eps = densify(h_core)
    energy = 0.0
    errors: list[np.ndarray] = []
    focks: list[np.ndarray] = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        fock = _fock(h_core, eri, density)
        # DIIS residual in the orthonormal basis
        err = x.T @ (fock @ density @ s - s @ density @ fock) @ x
        errors.append(err)
        focks.append(fock)
        if len(errors) > diis_size:
            errors.pop(0)
            focks.pop(0)
        if len(errors) >= 2:
            m = len(errors)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    b[i, j] = float(np.sum(errors[i] * errors[j]))
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                coeffs = np.linalg.solve(b, rhs)[:m]
                fock = sum(ci * fi for ci, fi in zip(coeffs, focks))
            except np.linalg.LinAlgError:
                pass
        density_new, c, eps = densify(fock)
        energy_new = 0.5 * float(np.sum(density_new * (h_core + _fock(h_core, eri, density_new))))
        d_rms = float(np.sqrt(np.mean((density_new - density) ** 2)))
        density = density_new
        if abs(energy_new - energy) < conv and d_rms < np.sqrt(conv):
            energy = energy_new
            converged = True
            break
        energy = energy_new

    return ScfResult(
        energy_total=energy + e_nuc,
        energy_electronic=energy,
        mo_coefficients=c,
        mo_energies=eps,
        density=density,
        converged=converged,
        iterations=it,
    )
