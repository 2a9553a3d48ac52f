import numpy as np
import pytest

from integralgen.basis import build_basis, h2
from integralgen.integrals import ao_integrals
from integralgen.scf import rhf

# Szabo & Ostlund, Modern Quantum Chemistry, H2/STO-3G at R = 1.4 bohr
SO_REFERENCE = {
    "s12": 0.6593,
    "t11": 0.7600,
    "eri_1111": 0.7746,
    "eri_1122": 0.5697,
    "eri_1212": 0.2970,
    "e_elec": -1.8310,
    "e_total": -1.1167,
}


@pytest.fixture(scope="module")
def h2_system():
    mol = h2(1.4)
    basis = build_basis(mol)
    return mol, basis, ao_integrals(mol, basis)


class TestH2Reference:
    def test_overlap(self, h2_system):
        _, _, (s, t, v, eri) = h2_system
        assert s[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert s[0, 1] == pytest.approx(SO_REFERENCE["s12"], abs=5e-5)

    def test_kinetic(self, h2_system):
        _, _, (s, t, v, eri) = h2_system
        assert t[0, 0] == pytest.approx(SO_REFERENCE["t11"], abs=5e-5)

    def test_eri_values(self, h2_system):
        _, _, (s, t, v, eri) = h2_system
        assert eri[0, 0, 0, 0] == pytest.approx(SO_REFERENCE["eri_1111"], abs=5e-5)
        assert eri[0, 0, 1, 1] == pytest.approx(SO_REFERENCE["eri_1122"], abs=5e-5)
        assert eri[0, 1, 0, 1] == pytest.approx(SO_REFERENCE["eri_1212"], abs=5e-5)

    def test_scf_energy(self, h2_system):
        mol, _, (s, t, v, eri) = h2_system
        res = rhf(s, t, v, eri, 2, mol.nuclear_repulsion())
        assert res.converged
        assert res.energy_electronic == pytest.approx(SO_REFERENCE["e_elec"], abs=5e-4)
        assert res.energy_total == pytest.approx(SO_REFERENCE["e_total"], abs=5e-4)


class TestEriSymmetry:
    def test_eightfold(self, h2_system):
        _, _, (s, t, v, eri) = h2_system
        for perm in (
            eri.transpose(1, 0, 2, 3),
            eri.transpose(0, 1, 3, 2),
            eri.transpose(2, 3, 0, 1),
        ):
            assert np.max(np.abs(eri - perm)) <= 1e-12

    def test_h_symmetric(self, h2_system):
        _, _, (s, t, v, eri) = h2_system
        assert np.max(np.abs((t + v) - (t + v).T)) <= 1e-12
