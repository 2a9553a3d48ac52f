"""Exact algebra over n-qubit Pauli strings and real-weighted sums of them.

A Pauli string is stored symplectically as two bitmasks (x_mask, z_mask):
bit i of x_mask set means an X component on qubit i, bit i of z_mask a Z
component, both set means Y, neither means identity.  Multiplication is
O(n) with an exact phase in {1, i, -1, -i}, and strings hash canonically,
which is what the Hessian evaluation and Jordan-Wigner expansion need.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DimensionError

DROP_TOL = 1e-12  # hartree; coefficients at or below this merge to zero
DENSE_QUBIT_LIMIT = 14

# phase_table[a][b] = k such that P_a P_b = i^k P_{a xor b}, single qubit,
# with ops coded (x, z): 0=I, 1=X, 2=Z, 3=Y.
_PHASE_TABLE = (
    (0, 0, 0, 0),
    (0, 0, 3, 1),  # X*I, X*X, X*Z=-iY, X*Y=iZ
    (0, 1, 0, 3),  # Z*X=iY, Z*Z, Z*Y=-iX
    (0, 3, 1, 0),  # Y*X=-iZ, Y*Z=iX, Y*Y
)

_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_CHAR = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


@dataclass(frozen=True)
class PauliString:
    """Hermitian, unitary n-qubit Pauli operator in symplectic form."""

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask bits set beyond n_qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Build from a character string, index 0 = qubit 0."""
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xb, zb = _CHAR_TO_XZ[ch]
            except KeyError:
                raise ValueError(f"unknown Pauli character {ch!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> "PauliString":
        """One-qubit operator `kind` in {X, Y, Z} on `qubit`, identity elsewhere."""
        xb, zb = _CHAR_TO_XZ[kind]
        return cls(n_qubits, xb << qubit, zb << qubit)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def label(self) -> str:
        return "".join(
            _XZ_TO_CHAR[((self.x_mask >> i) & 1, (self.z_mask >> i) & 1)]
            for i in range(self.n_qubits)
        )

    def weight(self) -> int:
        """Number of non-identity tensor factors."""
        return bin(self.x_mask | self.z_mask).count("1")

    def __repr__(self):
        return f"PauliString({self.label!r})"


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Exact product a·b = phase · product, phase in {1, i, -1, -i}."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    k = 0
    active = (a.x_mask | a.z_mask) & (b.x_mask | b.z_mask)
    q = 0
    while active >> q:
        if (active >> q) & 1:
            ca = ((a.x_mask >> q) & 1) | (((a.z_mask >> q) & 1) << 1)
            cb = ((b.x_mask >> q) & 1) | (((b.z_mask >> q) & 1) << 1)
            k += _PHASE_TABLE[ca][cb]
        q += 1
    phase = (1, 1j, -1, -1j)[k & 3]
    return phase, PauliString(a.n_qubits, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)


@lru_cache(maxsize=4096)
def string_action(n_qubits: int, x_mask: int, z_mask: int):
    """(perm, phase) arrays with (P psi)[k] = phase[k] * psi[perm[k]].

    P|b> = i^{|Y|} (-1)^{popcount(b & z_mask)} |b ^ x_mask>, so
    (P psi)[k] = i^{|Y|} (-1)^{popcount((k^x) & z)} psi[k ^ x].
    """
    dim = 1 << n_qubits
    idx = np.arange(dim)
    perm = idx ^ x_mask
    zbits = perm & z_mask
    # parity of popcount per index
    par = zbits.copy()
    shift = 1
    while shift < n_qubits + 1:
        par ^= par >> shift
        shift <<= 1
    signs = 1.0 - 2.0 * (par & 1)
    n_y = bin(x_mask & z_mask).count("1")
    phase = (1j) ** (n_y % 4) * signs
    perm.setflags(write=False)
    phase.setflags(write=False)
    return perm, phase


@dataclass(frozen=True)
class PauliTerm:
    coeff: complex
    string: PauliString

    def __post_init__(self):
        if not np.isfinite(complex(self.coeff)):
            raise ValueError("coefficient must be finite")


class Observable:
    """Finite weighted sum of Pauli strings on a fixed qubit count.

    Immutable after construction; `simplify` returns a new canonical
    instance (terms merged, near-zero dropped, lexicographic on
    (z_mask, x_mask)).
    """

    __slots__ = ("n_qubits", "terms", "_simplified")

    def __init__(self, n_qubits: int, terms=(), _simplified: bool = False):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        terms = tuple(terms)
        for t in terms:
            if t.string.n_qubits != n_qubits:
                raise DimensionError("term qubit count mismatch")
        self.n_qubits = n_qubits
        self.terms = terms
        self._simplified = _simplified

    @classmethod
    def from_terms(cls, n_qubits: int, pairs) -> "Observable":
        """pairs: iterable of (coeff, PauliString | label)."""
        terms = []
        for coeff, s in pairs:
            if isinstance(s, str):
                s = PauliString.from_label(s)
            terms.append(PauliTerm(complex(coeff), s))
        return cls(n_qubits, terms)

    @classmethod
    def zero(cls, n_qubits: int) -> "Observable":
        return cls(n_qubits, (), _simplified=True)

    def simplify(self, drop_tol: float = DROP_TOL) -> "Observable":
        if drop_tol < 0:
            raise ValueError("drop_tol must be non-negative")
        acc: dict[tuple[int, int], complex] = {}
        for t in self.terms:
            key = (t.string.z_mask, t.string.x_mask)
            acc[key] = acc.get(key, 0.0) + complex(t.coeff)
        out = []
        for (z, x) in sorted(acc):
            c = acc[(z, x)]
            if abs(c) > drop_tol:
                out.append(PauliTerm(c, PauliString(self.n_qubits, x, z)))
        return Observable(self.n_qubits, out, _simplified=True)

    @property
    def is_hermitian(self) -> bool:
        """True when all coefficients are real after simplification."""
        obs = self if self._simplified else self.simplify()
        return all(abs(t.coeff.imag) <= 1e-12 for t in obs.terms)

    def real_coeffs(self) -> "Observable":
        """Assert hermiticity and drop imaginary residues (<= 1e-12)."""
        obs = self if self._simplified else self.simplify()
        for t in obs.terms:
            if abs(t.coeff.imag) > 1e-12:
                raise ValueError(
                    f"non-Hermitian observable: Im coeff {t.coeff.imag!r} on {t.string.label}"
                )
        return Observable(
            self.n_qubits,
            [PauliTerm(complex(t.coeff.real), t.string) for t in obs.terms],
            _simplified=True,
        )

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        inner = " + ".join(f"{t.coeff:g}*{t.string.label}" for t in self.terms[:4])
        more = "" if len(self.terms) <= 4 else f" + ... ({len(self.terms)} terms)"
        return f"Observable({self.n_qubits}q: {inner}{more})"


def axpy(alpha: float, a: Observable, beta: float, b: Observable) -> Observable:
    """Simplified alpha*a + beta*b."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError("observable qubit counts differ")
    terms = [PauliTerm(alpha * t.coeff, t.string) for t in a.terms]
    terms += [PauliTerm(beta * t.coeff, t.string) for t in b.terms]
    return Observable(a.n_qubits, terms).simplify()


def scale(alpha: float, a: Observable) -> Observable:
    return Observable(a.n_qubits, [PauliTerm(alpha * t.coeff, t.string) for t in a.terms]).simplify()


def to_dense_matrix(obs: Observable) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the observable.  Guarded at 14 qubits."""
    n = obs.n_qubits
    if n > DENSE_QUBIT_LIMIT:
        raise CapacityError(f"dense matrix refused for n_qubits={n} > {DENSE_QUBIT_LIMIT}")
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    rows = np.arange(dim)
    for t in obs.terms:
        perm, phase = string_action(n, t.string.x_mask, t.string.z_mask)
        # (P psi)[k] = phase[k] * psi[k ^ x]  =>  P[k, k ^ x] = phase[k]
        mat[rows, perm] += t.coeff * phase
    return mat


def to_json_dict(obs: Observable) -> dict:
    o = obs.simplify()
    return {
        "n_qubits": o.n_qubits,
        "terms": [
            {"coeff": [t.coeff.real, t.coeff.imag], "pauli": t.string.label}
            for t in o.terms
        ],
    }


def from_json_dict(d: dict) -> Observable:
    n = int(d["n_qubits"])
    terms = []
    for entry in d["terms"]:
        re, im = entry["coeff"]
        s = PauliString.from_label(entry["pauli"])
        if s.n_qubits != n:
            raise DimensionError("pauli label length != n_qubits")
        terms.append(PauliTerm(complex(re, im), s))
    return Observable(n, terms, _simplified=False).simplify()


def save_observable(obs: Observable, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(obs), fh, indent=1)


def load_observable(path) -> Observable:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
