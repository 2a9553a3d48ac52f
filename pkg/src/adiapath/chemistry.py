"""Electronic-structure ingestion and fermion-to-qubit mapping.

Conventions (documented because FCIDUMP is spatial-orbital indexed while
the qubit layout is spin-orbital indexed):

* two-electron integrals are stored in chemists' notation (pq|rs), with
  the full 8-fold permutation symmetry;
* spin-orbitals are interleaved: spin-orbital 2p is (p, alpha) and 2p+1 is
  (p, beta), p a 0-based spatial index;
* the Hartree-Fock reference fills the lowest spin-orbitals, so aufbau
  filling puts alpha,beta pairs in the lowest spatial orbitals.

The FCIDUMP reader/writer supports the standard Molpro record layout plus
an ``# ORBENERGIES = e1 e2 ...`` comment extension carrying the active
orbital energies needed for Fock-Hamiltonian initialization.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParseError
from .paulis import Observable, PauliString, PauliTerm, multiply


@dataclass
class IntegralData:
    """Active-space integrals in chemists' notation, energies in hartree."""

    n_orbitals: int
    n_electrons: int
    h_core: np.ndarray          # (M, M) effective one-electron integrals
    eri: np.ndarray             # (M, M, M, M), eri[p,q,r,s] = (pq|rs)
    core_energy: float = 0.0    # K_C + nuclear repulsion
    orbital_energies: np.ndarray | None = None  # per spatial orbital
    ms2: int = 0

    def validate(self, tol: float = 1e-10) -> None:
        M = self.n_orbitals
        if self.h_core.shape != (M, M) or self.eri.shape != (M, M, M, M):
            raise ContractError("integral array shapes inconsistent with n_orbitals")
        if np.max(np.abs(self.h_core - self.h_core.T)) > tol:
            raise ContractError("h_core not symmetric")
        e = self.eri
        for perm in (e.transpose(1, 0, 2, 3), e.transpose(0, 1, 3, 2), e.transpose(2, 3, 0, 1)):
            if np.max(np.abs(e - perm)) > tol:
                raise ContractError("eri violates 8-fold permutation symmetry")

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_orbitals


# ---------------------------------------------------------------------------
# fermion operators


class FermionOperator:
    """Sum of products of creation/annihilation operators.

    Terms map a tuple of (spin_orbital_index, is_creation) factors to a
    complex coefficient.  The empty tuple is the identity.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[tuple[int, bool], ...], complex] | None = None):
        self.terms = dict(terms) if terms else {}

    @classmethod
    def term(cls, factors, coeff=1.0) -> "FermionOperator":
        return cls({tuple((int(i), bool(d)) for i, d in factors): complex(coeff)})

    @classmethod
    def identity(cls, coeff=1.0) -> "FermionOperator":
        return cls({(): complex(coeff)})

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return FermionOperator(out)

    def __sub__(self, other: "FermionOperator") -> "FermionOperator":
        return self + (other * -1.0)

    def __mul__(self, other) -> "FermionOperator":
        if isinstance(other, FermionOperator):
            out: dict = {}
            for ka, va in self.terms.items():
                for kb, vb in other.terms.items():
                    k = ka + kb
                    out[k] = out.get(k, 0.0) + va * vb
            return FermionOperator(out)
        out = {k: v * complex(other) for k, v in self.terms.items()}
        return FermionOperator(out)

    __rmul__ = __mul__

    def dagger(self) -> "FermionOperator":
        out: dict = {}
        for k, v in self.terms.items():
            kd = tuple((i, not d) for i, d in reversed(k))
            out[kd] = out.get(kd, 0.0) + v.conjugate()
        return FermionOperator(out)

    def compress(self, tol: float = 1e-12) -> "FermionOperator":
        return FermionOperator({k: v for k, v in self.terms.items() if abs(v) > tol})

    def max_index(self) -> int:
        m = -1
        for k in self.terms:
            for i, _ in k:
                m = max(m, i)
        return m

    def normal_ordered(self, tol: float = 1e-12) -> "FermionOperator":
        """Canonical form: creations left of annihilations, indices descending
        then ascending, using {a_i, a†_j} = δ_ij and {a,a} = {a†,a†} = 0."""
        out = FermionOperator()
        for factors, coeff in self.terms.items():
            out = out + _normal_order_term(list(factors), complex(coeff))
        return out.compress(tol)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        diff = (self - self.dagger()).normal_ordered()
        return all(abs(v) <= tol for v in diff.terms.values())

    def __repr__(self):
        return f"FermionOperator({len(self.terms)} terms)"


def _normal_order_term(factors: list[tuple[int, bool]], coeff: complex) -> FermionOperator:
    # bubble creations to the left; each swap across unequal indices flips
    # the sign, equal indices produce the anticommutator contraction.
    out = FermionOperator()
    i = 0
    while i + 1 < len(factors):
        (pi, di), (pj, dj) = factors[i], factors[i + 1]
        if (not di) and dj:
            # a_p a†_q = δ_pq - a†_q a_p
            if pi == pj:
                out = out + _normal_order_term(factors[:i] + factors[i + 2:], coeff)
            factors = factors[:i] + [(pj, dj), (pi, di)] + factors[i + 2:]
            coeff = -coeff
            i = max(i - 1, 0)
        elif di == dj and pi == pj:
            return out  # a†a† or aa with equal index annihilates the term
        elif di == dj and pi < pj and di:
            factors[i], factors[i + 1] = factors[i + 1], factors[i]
            coeff = -coeff
            i = max(i - 1, 0)
        elif di == dj and pi > pj and not di:
            factors[i], factors[i + 1] = factors[i + 1], factors[i]
            coeff = -coeff
            i = max(i - 1, 0)
        else:
            i += 1
    return out + FermionOperator({tuple(factors): coeff})


def spin_summed_excitation(p: int, q: int) -> FermionOperator:
    """E_pq = a†_{p,alpha} a_{q,alpha} + a†_{p,beta} a_{q,beta}, interleaved layout."""
    return FermionOperator.term([(2 * p, True), (2 * q, False)]) + FermionOperator.term(
        [(2 * p + 1, True), (2 * q + 1, False)]
    )


def build_active_hamiltonian(d: IntegralData) -> FermionOperator:
    """Second-quantized active-space Hamiltonian with the core shift folded in:
    const + sum_pq h^C_pq E_pq + 1/2 sum_pqrs (pq|rs) (E_pq E_rs - δ_qr E_ps)."""
    d.validate()
    M = d.n_orbitals
    H = FermionOperator.identity(d.core_energy)
    for p in range(M):
        for q in range(M):
            if abs(d.h_core[p, q]) > 1e-14:
                H = H + spin_summed_excitation(p, q) * d.h_core[p, q]
    for p in range(M):
        for q in range(M):
            for r in range(M):
                for s in range(M):
                    g = d.eri[p, q, r, s]
                    if abs(g) <= 1e-14:
                        continue
                    H = H + spin_summed_excitation(p, q) * spin_summed_excitation(r, s) * (0.5 * g)
                    if q == r:
                        H = H + spin_summed_excitation(p, s) * (-0.5 * g)
    return H


# ---------------------------------------------------------------------------
# Jordan-Wigner


def _jw_ladder(i: int, creation: bool, n_qubits: int) -> Observable:
    """a†_i -> 1/2 (prod_{k<i} Z_k)(X_i -+ iY_i); a_i gets the +i sign."""
    zmask = (1 << i) - 1
    x_term = PauliString(n_qubits, 1 << i, zmask)
    y_term = PauliString(n_qubits, 1 << i, zmask | (1 << i))
    sign = -1j if creation else 1j
    return Observable(n_qubits, [PauliTerm(0.5, x_term), PauliTerm(0.5 * sign, y_term)])


def jordan_wigner(fo: FermionOperator, n_qubits: int | None = None) -> Observable:
    """Map a fermionic operator to a qubit observable.

    Expands each factor with the JW substitution and multiplies the Pauli
    strings exactly.  The result is simplified but coefficients keep their
    imaginary parts (anti-Hermitian inputs are legal, e.g. UCCSD generators).
    """
    if n_qubits is None:
        n_qubits = fo.max_index() + 1
    if fo.max_index() >= n_qubits:
        raise ContractError("operator index exceeds declared qubit count")
    total: list[PauliTerm] = []
    identity = PauliString.identity(n_qubits)
    for factors, coeff in fo.terms.items():
        partial: list[tuple[complex, PauliString]] = [(complex(coeff), identity)]
        for i, creation in factors:
            ladder = _jw_ladder(i, creation, n_qubits)
            nxt = []
            for c, s in partial:
                for lt in ladder.terms:
                    ph, prod = multiply(s, lt.string)
                    nxt.append((c * lt.coeff * ph, prod))
            partial = nxt
        total.extend(PauliTerm(c, s) for c, s in partial)
    return Observable(n_qubits, total).simplify()


def jordan_wigner_hermitian(fo: FermionOperator, n_qubits: int | None = None) -> Observable:
    """JW map for Hermitian operators; asserts real coefficients."""
    obs = jordan_wigner(fo, n_qubits)
    try:
        return obs.real_coeffs()
    except ValueError as exc:
        raise ContractError(str(exc)) from exc


def qubit_hamiltonian(d: IntegralData) -> Observable:
    """Full pipeline: integrals -> fermionic Hamiltonian -> JW observable."""
    return jordan_wigner_hermitian(build_active_hamiltonian(d), d.n_spin_orbitals)


def fock_hamiltonian(orbital_energies, n_spin_orbitals: int) -> Observable:
    """JW image of sum_i eps_i a†_i a_i = sum_i eps_i (I - Z_i)/2.

    `orbital_energies` may be per spin-orbital (length n_spin_orbitals) or
    per spatial orbital (length n_spin_orbitals/2, duplicated across spins).
    """
    eps = np.asarray(orbital_energies, dtype=float)
    if eps.size * 2 == n_spin_orbitals:
        eps = np.repeat(eps, 2)
    if eps.size != n_spin_orbitals:
        raise ContractError("need one orbital energy per spin orbital")
    terms = [PauliTerm(0.5 * float(np.sum(eps)), PauliString.identity(n_spin_orbitals))]
    for i, e in enumerate(eps):
        terms.append(PauliTerm(-0.5 * float(e), PauliString.single(n_spin_orbitals, i, "Z")))
    return Observable(n_spin_orbitals, terms).simplify()


def transverse_hamiltonian(n_qubits: int) -> Observable:
    """-sum_i X_i, ground state |+>^n at energy -n."""
    terms = [
        PauliTerm(-1.0, PauliString.single(n_qubits, i, "X")) for i in range(n_qubits)
    ]
    return Observable(n_qubits, terms).simplify()


def hf_bitstring(n_electrons: int, n_spin_orbitals: int) -> str:
    """Aufbau filling of the lowest spin-orbitals under the interleaved layout."""
    if n_electrons > n_spin_orbitals:
        raise ContractError("more electrons than spin orbitals")
    return "1" * n_electrons + "0" * (n_spin_orbitals - n_electrons)


def number_operator(n_qubits: int) -> Observable:
    """Total particle number sum_i (I - Z_i)/2 under JW."""
    terms = [PauliTerm(0.5 * n_qubits, PauliString.identity(n_qubits))]
    for i in range(n_qubits):
        terms.append(PauliTerm(-0.5, PauliString.single(n_qubits, i, "Z")))
    return Observable(n_qubits, terms).simplify()


# ---------------------------------------------------------------------------
# FCIDUMP

_FLOAT_RE = re.compile(r"[-+]?\d*\.?\d+(?:[eEdD][-+]?\d+)?")


def _parse_float(tok: str) -> float:
    return float(tok.replace("D", "E").replace("d", "e"))


def parse_fcidump(text: str) -> IntegralData:
    """Parse an FCIDUMP string (Molpro conventions, Fortran exponents ok).

    Record patterns, indices 1-based:
      v i j k l  -> (ij|kl)
      v i j 0 0  -> h_ij
      v i 0 0 0  -> orbital energy eps_i
      v 0 0 0 0  -> scalar constant (core + nuclear repulsion)
    The ``# ORBENERGIES = ...`` comment extension overrides i000 records.
    """
    lines = text.splitlines()
    header_chunks: list[str] = []
    body_start = None
    for ln, raw in enumerate(lines):
        stripped = raw.strip()
        if ln == 0 and not stripped.upper().startswith("&FCI"):
            raise ParseError("FCIDUMP must start with &FCI", 1)
        header_chunks.append(stripped)
        if "&END" in stripped.upper() or stripped == "/":
            body_start = ln + 1
            break
    if body_start is None:
        raise ParseError("missing &END in FCIDUMP header")

    header = " ".join(header_chunks)
    header = header.replace("&FCI", "").replace("&END", "").replace("/", "")

    def header_int(key: str) -> int | None:
        m = re.search(rf"{key}\s*=\s*([-+]?\d+)", header, flags=re.IGNORECASE)
        return int(m.group(1)) if m else None

    norb = header_int("NORB")
    nelec = header_int("NELEC")
    if norb is None or nelec is None:
        raise ParseError("header must define NORB and NELEC", 1)
    ms2 = header_int("MS2") or 0

    h = np.zeros((norb, norb))
    eri = np.zeros((norb, norb, norb, norb))
    core = None
    orbe = np.full(norb, np.nan)
    orbe_comment = None

    for ln in range(body_start, len(lines)):
        raw = lines[ln].strip()
        if not raw:
            continue
        if raw.startswith("#"):
            m = re.match(r"#\s*ORBENERGIES\s*=\s*(.*)", raw, flags=re.IGNORECASE)
            if m:
                orbe_comment = [_parse_float(t) for t in m.group(1).split()]
            continue
        toks = raw.split()
        if len(toks) != 5:
            raise ParseError(f"expected 'value i j k l', got {raw!r}", ln + 1)
        try:
            v = _parse_float(toks[0])
            i, j, k, l = (int(t) for t in toks[1:])
        except ValueError:
            raise ParseError(f"unparsable record {raw!r}", ln + 1) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise ParseError(f"orbital index {idx} out of range 1..{norb}", ln + 1)
        if i == j == k == l == 0:
            core = v
        elif k == 0 and l == 0 and j == 0:
            orbe[i - 1] = v
        elif k == 0 and l == 0:
            h[i - 1, j - 1] = v
            h[j - 1, i - 1] = v
        else:
            if min(i, j, k, l) == 0:
                raise ParseError(f"mixed zero indices in record {raw!r}", ln + 1)
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for (a, b, c, dd) in _eightfold((p, q, r, s)):
                eri[a, b, c, dd] = v

    if core is None:
        core = 0.0

    if orbe_comment is not None:
        if len(orbe_comment) != norb:
            raise ParseError("ORBENERGIES count != NORB")
        energies = np.asarray(orbe_comment)
    elif not np.any(np.isnan(orbe)):
        energies = orbe
    else:
        energies = None

    data = IntegralData(
        n_orbitals=norb,
        n_electrons=nelec,
        h_core=h,
        eri=eri,
        core_energy=core,
        orbital_energies=energies,
        ms2=ms2,
    )
    data.validate()
    return data


def _eightfold(idx):
    p, q, r, s = idx
    return {
        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
        (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
    }


def parse_fcidump_file(path) -> IntegralData:
    with open(path) as fh:
        return parse_fcidump(fh.read())


def emit_fcidump(d: IntegralData, ms2: int | None = None) -> str:
    """Serialize IntegralData to FCIDUMP text with the ORBENERGIES extension."""
    d.validate()
    M = d.n_orbitals
    ms2 = d.ms2 if ms2 is None else ms2
    out = [
        f"&FCI NORB={M},NELEC={d.n_electrons},MS2={ms2},",
        "  ORBSYM=" + "1," * M,
        "  ISYM=1,",
        "&END",
    ]
    if d.orbital_energies is not None:
        out.append("# ORBENERGIES = " + " ".join(f"{e:.16E}" for e in d.orbital_energies))
    seen = set()
    for p in range(M):
        for q in range(p + 1):
            for r in range(M):
                for s in range(r + 1):
                    if (p, q) < (r, s):
                        continue
                    key = (p, q, r, s)
                    if key in seen or abs(d.eri[p, q, r, s]) < 1e-16:
                        continue
                    seen.add(key)
                    out.append(f" {d.eri[p, q, r, s]: .16E} {p + 1:3d} {q + 1:3d} {r + 1:3d} {s + 1:3d}")
    for p in range(M):
        for q in range(p + 1):
            if abs(d.h_core[p, q]) >= 1e-16:
                out.append(f" {d.h_core[p, q]: .16E} {p + 1:3d} {q + 1:3d}   0   0")
    out.append(f" {d.core_energy: .16E}   0   0   0   0")
    return "\n".join(out) + "\n"


def cas_reduce(h_full: np.ndarray, eri_full: np.ndarray, core_orbitals,
               active_orbitals, constant: float = 0.0) -> tuple[np.ndarray, np.ndarray, float]:
    """Fold core orbitals into effective integrals over the active window.

    Returns (h_eff, eri_active, constant + K_C) with
      h^C_pq = h_pq + sum_I [2 (pq|II) - (pI|Iq)]
      K_C    = 2 sum_I h_II + sum_IJ [2 (II|JJ) - (IJ|JI)].
    """
    core = list(core_orbitals)
    act = list(active_orbitals)
    k_c = 2.0 * sum(h_full[i, i] for i in core)
    k_c += sum(2.0 * eri_full[i, i, j, j] - eri_full[i, j, j, i] for i in core for j in core)
    n_act = len(act)
    h_eff = np.zeros((n_act, n_act))
    for a, p in enumerate(act):
        for b, q in enumerate(act):
            h_eff[a, b] = h_full[p, q] + sum(
                2.0 * eri_full[p, q, i, i] - eri_full[p, i, i, q] for i in core
            )
    eri_act = eri_full[np.ix_(act, act, act, act)].copy()
    return h_eff, eri_act, constant + k_c
