"""Active-space reduction and determinant-space CASCI.

The CI step is deliberately independent of any qubit-mapping code: the
Hamiltonian is applied directly to occupation bitmasks with fermionic sign
bookkeeping, so its energies can arbitrate a Jordan-Wigner pipeline.
Spin-orbital modes interleave spins: mode 2p is (p, alpha), 2p+1 (p, beta).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


@dataclass
class ActiveSpace:
    h_eff: np.ndarray          # effective one-electron integrals, active window
    eri: np.ndarray            # (pq|rs) over active orbitals
    constant: float            # K_C + nuclear repulsion
    k_core: float              # core shift alone
    orbital_energies: np.ndarray  # active-orbital RHF eigenvalues
    n_orbitals: int
    n_electrons: int


def mo_transform(h_ao, eri_ao, c):
    h_mo = c.T @ h_ao @ c
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri_ao, c, c, c, c, optimize=True)
    return h_mo, eri_mo


def build_active_space(h_mo, eri_mo, mo_energies, n_electrons_total: int,
                       n_active_orbitals: int, n_active_electrons: int,
                       e_nuc: float, core=None, active=None) -> ActiveSpace:
    n_core = (n_electrons_total - n_active_electrons) // 2
    if core is None:
        core = list(range(n_core))
    if active is None:
        active = list(range(n_core, n_core + n_active_orbitals))
    if len(core) != n_core or len(active) != n_active_orbitals:
        raise ValueError("core/active window sizes inconsistent with electron counts")

    k_core = 2.0 * sum(h_mo[i, i] for i in core)
    k_core += sum(
        2.0 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i] for i in core for j in core
    )
    n_act = len(active)
    h_eff = np.zeros((n_act, n_act))
    for a, p in enumerate(active):
        for b, q in enumerate(active):
            h_eff[a, b] = h_mo[p, q] + sum(
                2.0 * eri_mo[p, q, i, i] - eri_mo[p, i, i, q] for i in core
            )
    eri_act = eri_mo[np.ix_(active, active, active, active)].copy()
    return ActiveSpace(
        h_eff=h_eff,
        eri=eri_act,
        constant=k_core + e_nuc,
        k_core=k_core,
        orbital_energies=np.asarray(mo_energies[active]),
        n_orbitals=n_act,
        n_electrons=n_active_electrons,
    )


def _apply_excitation(det: int, p: int, q: int, spin: int):
    """a†_{p,spin} a_{q,spin} |det> -> (new_det, sign) or None."""
    mq = 2 * q + spin
    mp = 2 * p + spin
    if not (det >> mq) & 1:
        return None
    sign = -1.0 if bin(det & ((1 << mq) - 1)).count("1") & 1 else 1.0
    det ^= 1 << mq
    if (det >> mp) & 1:
        return None
    if bin(det & ((1 << mp) - 1)).count("1") & 1:
        sign = -sign
    det ^= 1 << mp
    return det, sign


def casci_ground_energy(space: ActiveSpace) -> tuple[float, np.ndarray, list[int]]:
    """Lowest eigenvalue of the active Hamiltonian over all determinants with
    the right electron count.  Returns (total energy, CI vector, determinants)."""
    n_modes = 2 * space.n_orbitals
    dets = [
        sum(1 << m for m in occ)
        for occ in combinations(range(n_modes), space.n_electrons)
    ]
    index = {d: i for i, d in enumerate(dets)}
    dim = len(dets)
    ham = np.zeros((dim, dim))
    m = space.n_orbitals

    for j, det in enumerate(dets):
        # one-body: sum_pq h_pq E_pq
        for p in range(m):
            for q in range(m):
                hpq = space.h_eff[p, q]
                if hpq == 0.0:
                    continue
                for spin in (0, 1):
                    hit = _apply_excitation(det, p, q, spin)
                    if hit is not None:
                        ham[index[hit[0]], j] += hpq * hit[1]
        # two-body: 1/2 sum_pqrs (pq|rs) (E_pq E_rs - delta_qr E_ps)
        for r in range(m):
            for s in range(m):
                stage = [
                    _apply_excitation(det, r, s, spin2) for spin2 in (0, 1)
                ]
                for p in range(m):
                    for q in range(m):
                        g = 0.5 * space.eri[p, q, r, s]
                        if g == 0.0:
                            continue
                        for first in stage:
                            if first is None:
                                continue
                            det1, sign1 = first
                            for spin in (0, 1):
                                hit = _apply_excitation(det1, p, q, spin)
                                if hit is not None:
                                    ham[index[hit[0]], j] += g * sign1 * hit[1]
                        if q == r:
                            for spin in (0, 1):
                                hit = _apply_excitation(det, p, s, spin)
                                if hit is not None:
                                    ham[index[hit[0]], j] -= g * hit[1]

    vals, vecs = np.linalg.eigh(ham)
    return float(vals[0]) + space.constant, vecs[:, 0], dets


def hf_determinant_energy(space: ActiveSpace) -> float:
    """<HF|H|HF> + constant for the aufbau determinant of the active window."""
    ha = space.h_eff
    g = space.eri
    n_docc = space.n_electrons // 2
    e = 2.0 * sum(ha[i, i] for i in range(n_docc))
    e += sum(
        2.0 * g[i, i, j, j] - g[i, j, j, i]
        for i in range(n_docc)
        for j in range(n_docc)
    )
    return e + space.constant
