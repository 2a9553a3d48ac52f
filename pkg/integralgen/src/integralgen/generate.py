"""One-shot generation of active-space FCIDUMP files plus reference sidecars."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import build_basis, linear_beh2
from .casci import build_active_space, casci_ground_energy, hf_determinant_energy, mo_transform
from .integrals import ao_integrals
from .scf import ScfError, rhf


# grid spanning the near-equilibrium, intermediate and far-dissociation regimes
DEFAULT_GRID = (1.326, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.3)


@dataclass
class GeometryRequest:
    bond_lengths: list[float]      # angstrom
    basis: str = "STO-3G"
    n_active_electrons: int = 4
    n_active_orbitals: int = 4

    def __post_init__(self):
        if any(r <= 0 for r in self.bond_lengths):
            raise ValueError("bond lengths must be positive")
        if self.basis != "STO-3G":
            raise ValueError("only STO-3G is wired up")
        # stable dedup, preserving first-seen order
        seen = []
        for r in self.bond_lengths:
            if r not in seen:
                seen.append(r)
        self.bond_lengths = seen


def write_fcidump(space, path) -> None:
    m = space.n_orbitals
    lines = [
        f"&FCI NORB={m},NELEC={space.n_electrons},MS2=0,",
        "  ORBSYM=" + "1," * m,
        "  ISYM=1,",
        "&END",
        "# ORBENERGIES = " + " ".join(f"{e:.16E}" for e in space.orbital_energies),
    ]
    for p in range(m):
        for q in range(p + 1):
            for r in range(m):
                for s in range(r + 1):
                    if (p, q) < (r, s):
                        continue
                    val = space.eri[p, q, r, s]
                    if abs(val) >= 1e-16:
                        lines.append(
                            f" {val: .16E} {p + 1:3d} {q + 1:3d} {r + 1:3d} {s + 1:3d}"
                        )
    for p in range(m):
        for q in range(p + 1):
            if abs(space.h_eff[p, q]) >= 1e-16:
                lines.append(f" {space.h_eff[p, q]: .16E} {p + 1:3d} {q + 1:3d}   0   0")
    lines.append(f" {space.constant: .16E}   0   0   0   0")
    Path(path).write_text("\n".join(lines) + "\n")


def _sigma_pi_split(basis, s, mo_coefficients):
    """Classify MOs of a z-axis linear molecule as sigma or pi.

    px/py AOs are symmetry-orthogonal to every sigma AO, so the overlap
    metric weight of an MO on the px/py block is 0 or 1 up to roundoff.
    """
    pi_ao = [i for i, g in enumerate(basis) if g.lmn in ((1, 0, 0), (0, 1, 0))]
    n_mo = mo_coefficients.shape[1]
    sigma, pi = [], []
    for j in range(n_mo):
        c = mo_coefficients[:, j]
        w = float(c[pi_ao] @ s[np.ix_(pi_ao, pi_ao)] @ c[pi_ao]) if pi_ao else 0.0
        (pi if w > 0.5 else sigma).append(j)
    return sigma, pi


def solve_geometry(r_angstrom: float, n_active_electrons: int = 4,
                   n_active_orbitals: int = 4):
    """RHF + CASCI for one linear BeH2 geometry; returns (space, sidecar dict).

    Active-space selection is manual in the same sense as the source data:
    the core is the lowest sigma MO (Be 1s) and the active window is the
    next four sigma MOs (bonding and antibonding valence set).  Pure
    energy ordering would pull in the nonbonding, degenerate pi pair at
    equilibrium and split it at stretched geometries.
    """
    mol = linear_beh2(r_angstrom)
    basis = build_basis(mol)
    s, t, v, eri = ao_integrals(mol, basis)
    e_nuc = mol.nuclear_repulsion()
    scf = rhf(s, t, v, eri, mol.n_electrons, e_nuc)
    if not scf.converged:
        raise ScfError(f"SCF did not converge at r={r_angstrom}")
    h_mo, eri_mo = mo_transform(t + v, eri, scf.mo_coefficients)
    sigma, _pi = _sigma_pi_split(basis, s, scf.mo_coefficients)
    n_core = (mol.n_electrons - n_active_electrons) // 2
    if len(sigma) < n_core + n_active_orbitals:
        raise ScfError("not enough sigma orbitals for the requested window")
    core = sigma[:n_core]
    active = sigma[n_core:n_core + n_active_orbitals]
    space = build_active_space(
        h_mo, eri_mo, scf.mo_energies, mol.n_electrons,
        n_active_orbitals, n_active_electrons, e_nuc,
        core=core, active=active,
    )
    e_fci, _, _ = casci_ground_energy(space)
    e_hf_active = hf_determinant_energy(space)
    sidecar = {
        "molecule": "BeH2",
        "geometry": "linear, symmetric stretch",
        "r_angstrom": r_angstrom,
        "basis": "STO-3G",
        "n_active_electrons": n_active_electrons,
        "n_active_orbitals": n_active_orbitals,
        "e_nuc": e_nuc,
        "e_scf": scf.energy_total,
        "e_hf_active": e_hf_active,
        "e_fci": e_fci,
        "k_core": space.k_core,
        "constant": space.constant,
        "orbital_energies_active": space.orbital_energies.tolist(),
        "orbital_energies_all": scf.mo_energies.tolist(),
        "core_mo_indices": [int(i) for i in core],
        "active_mo_indices": [int(i) for i in active],
        "scf_iterations": scf.iterations,
    }
    return space, sidecar


def file_stem(r_angstrom: float) -> str:
    return f"beh2_r{r_angstrom:.3f}"


def generate(req: GeometryRequest, out_dir) -> list[dict]:
    """Write one FCIDUMP + sidecar JSON per geometry; returns the sidecars.

    Failures (e.g. SCF non-convergence) are recorded in the returned list
    and generation continues with the remaining geometries.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for r in req.bond_lengths:
        stem = file_stem(r)
        try:
            space, sidecar = solve_geometry(r, req.n_active_electrons, req.n_active_orbitals)
        except ScfError as exc:
            results.append({"r_angstrom": r, "error": str(exc)})
            continue
        write_fcidump(space, out / f"{stem}.fcidump")
        sidecar["fcidump"] = f"{stem}.fcidump"
        (out / f"{stem}.json").write_text(json.dumps(sidecar, indent=1))
        results.append(sidecar)
    return results
