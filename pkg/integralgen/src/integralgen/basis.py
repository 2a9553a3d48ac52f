"""STO-3G basis set data and contracted Gaussian construction.

Exponents and contraction coefficients are the published STO-3G values
(EMSL / Basis Set Exchange).  Contraction coefficients refer to normalized
primitives; contracted functions are renormalized exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# element -> list of (shell type, exponents, coefficients)
STO3G = {
    "H": [
        ("S", [3.42525091, 0.62391373, 0.16885540],
              [0.15432897, 0.53532814, 0.44463454]),
    ],
    "Be": [
        ("S", [30.1678710, 5.4951153, 1.4871927],
              [0.15432897, 0.53532814, 0.44463454]),
        ("S", [1.3148331, 0.3055389, 0.0993707],
              [-0.09996723, 0.39951283, 0.70011547]),
        ("P", [1.3148331, 0.3055389, 0.0993707],
              [0.15591627, 0.60768372, 0.39195739]),
    ],
}

CHARGES = {"H": 1, "Be": 4}

ANGSTROM_TO_BOHR = 1.8897259886


def _double_factorial(n: int) -> int:
    if n <= 0:
        return 1
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, lmn) -> float:
    l, m, n = lmn
    num = (2.0 * alpha / math.pi) ** 0.75 * (4.0 * alpha) ** ((l + m + n) / 2.0)
    den = math.sqrt(
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return num / den


@dataclass
class ContractedGaussian:
    """Fixed angular momentum (l, m, n) Cartesian contracted Gaussian."""

    center: np.ndarray
    lmn: tuple[int, int, int]
    exponents: np.ndarray
    coefficients: np.ndarray  # includes primitive and contraction normalization

    @classmethod
    def build(cls, center, lmn, exponents, raw_coefficients) -> "ContractedGaussian":
        exps = np.asarray(exponents, dtype=float)
        coefs = np.asarray(raw_coefficients, dtype=float) * np.array(
            [primitive_norm(a, lmn) for a in exponents]
        )
        g = cls(np.asarray(center, dtype=float), tuple(lmn), exps, coefs)
        # exact contracted normalization
        from .integrals import overlap_contracted

        s = overlap_contracted(g, g)
        g.coefficients = g.coefficients / math.sqrt(s)
        return g


@dataclass
class Molecule:
    symbols: list[str]
    coords: np.ndarray  # (n_atoms, 3) in bohr

    @property
    def charges(self) -> list[int]:
        return [CHARGES[s] for s in self.symbols]

    @property
    def n_electrons(self) -> int:
        return sum(self.charges)

    def nuclear_repulsion(self) -> float:
        e = 0.0
        for i in range(len(self.symbols)):
            for j in range(i + 1, len(self.symbols)):
                r = float(np.linalg.norm(self.coords[i] - self.coords[j]))
                e += self.charges[i] * self.charges[j] / r
        return e


def linear_beh2(r_angstrom: float) -> Molecule:
    """H-Be-H on the z axis, both bonds r, angle 180 degrees."""
    r = r_angstrom * ANGSTROM_TO_BOHR
    coords = np.array([[0.0, 0.0, -r], [0.0, 0.0, 0.0], [0.0, 0.0, r]])
    return Molecule(["H", "Be", "H"], coords)


def h2(r_bohr: float) -> Molecule:
    return Molecule(["H", "H"], np.array([[0.0, 0.0, 0.0], [0.0, 0.0, r_bohr]]))


_P_COMPONENTS = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def build_basis(mol: Molecule) -> list[ContractedGaussian]:
    basis = []
    for sym, xyz in zip(mol.symbols, mol.coords):
        for shell, exps, coefs in STO3G[sym]:
            if shell == "S":
                basis.append(ContractedGaussian.build(xyz, (0, 0, 0), exps, coefs))
            elif shell == "P":
                for lmn in _P_COMPONENTS:
                    basis.append(ContractedGaussian.build(xyz, lmn, exps, coefs))
            else:
                raise ValueError(f"unsupported shell {shell}")
    return basis
