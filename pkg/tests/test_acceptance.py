"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Everything here runs from the committed golden data; the
integral generator package is not required.
"""
import json
import math
import statistics
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from adiapath.ansatz import build_hea, build_uccsd, hf_params_for_hea
from adiapath.chemistry import (
    build_active_hamiltonian,
    fock_hamiltonian,
    hf_bitstring,
    jordan_wigner_hermitian,
    parse_fcidump_file,
    qubit_hamiltonian,
)
from adiapath.cli import main as cli_main
from adiapath.continuation import ContinuationProblem, MethodConfig, run, method_by_name
from adiapath.derivatives import EnergyFunctional
from adiapath.exact import ground_energy
from adiapath.experiments import ExperimentConfig, run_experiment
from adiapath.optimizers import LbfgsConfig
from adiapath.paulis import to_dense_matrix
from adiapath.schedules import make_schedule

from conftest import random_hermitian_observable
from oracles import fermion_dense, random_integral_data
from test_derivatives import fd_gradient, fd_hessian, one_qubit_functional

DATA = Path(__file__).resolve().parent.parent / "data" / "beh2"
LINEAR = make_schedule("linear")
CUBIC = make_schedule("cubic")


def report(name: str, detail: str = ""):
    print(f"\nACCEPTANCE {name}: PASS {detail}".rstrip())


def golden(r: str):
    fdump = DATA / f"beh2_r{r}.fcidump"
    sidecar = json.loads((DATA / f"beh2_r{r}.json").read_text())
    return str(fdump), sidecar


def test_criterion_derivative_exactness():
    """Parameter-shift derivatives agree with finite differences on random
    4-qubit HEA depth-2 instances (gradient 1e-6, Hessian 1e-4 and symmetric
    to 1e-9, q_vector vs FD-in-t 1e-6)."""
    rng = np.random.default_rng(2024)
    for trial in range(20):
        h0 = random_hermitian_observable(rng, 4, 6)
        h1 = random_hermitian_observable(rng, 4, 6)
        f = EnergyFunctional(build_hea(4, 2), h0, h1, CUBIC)
        theta = rng.normal(size=f.n_params)
        t = float(rng.uniform(0.1, 0.9))

        grad = f.gradient_parameter_shift(theta, t)
        assert np.max(np.abs(grad - fd_gradient(f, theta, t))) <= 1e-6

        hess = f.hessian(theta, t)
        assert np.max(np.abs(hess - hess.T)) <= 1e-9
        assert np.max(np.abs(hess - fd_hessian(f, theta, t))) <= 1e-4

        step = 1e-5
        fd_q = (f.gradient(theta, t + step) - f.gradient(theta, t - step)) / (2 * step)
        assert np.max(np.abs(f.q_vector(theta, t) - fd_q)) <= 1e-6
    report("derivative-exactness", "(20 random instances)")


def test_criterion_analytic_continuation_oracle():
    """All five named methods with a VQE(L-BFGS) corrector solve the 1-qubit
    -Z -> -X continuation to |theta - pi/2| <= 1e-6 and E = -1 +- 1e-9; the
    pure Euler predictor with 100 steps lands within 1e-2."""
    details = []
    for method in ("aavqe", "vaqc", "aqc-pqc", "g-aqc-pqc", "g-aqc-pqc-vqe"):
        f = one_qubit_functional()
        cfg = method_by_name(method)
        if cfg.corrector is None:
            cfg = MethodConfig(predictor=cfg.predictor, corrector=LbfgsConfig())
        theta, trace = run(ContinuationProblem(f, 10, np.zeros(1)), cfg)
        assert abs(theta[0] - math.pi / 2) <= 1e-6, method
        assert abs(trace.records[-1].energy - (-1.0)) <= 1e-9, method
        details.append(f"{method}:{abs(theta[0] - math.pi / 2):.1e}")
    f = one_qubit_functional()
    theta, _ = run(
        ContinuationProblem(f, 100, np.zeros(1)),
        MethodConfig(predictor="euler_pinv", corrector=None),
    )
    assert abs(theta[0] - math.pi / 2) <= 1e-2
    report("analytic-continuation-oracle", f"({' '.join(details)})")


@pytest.mark.parametrize("r_label", ["1.326", "1.500"])
def test_criterion_chemical_accuracy_near_equilibrium(r_label):
    """UCCSD + L-BFGS plain VQE reaches chemical accuracy at near-equilibrium
    geometries; the dense oracle matches the committed sidecar FCI to 1e-6."""
    fdump, sidecar = golden(r_label)
    row = run_experiment(
        ExperimentConfig(
            fcidump=fdump, r=float(r_label), initial="fock", ansatz="uccsd",
            steps=1, method="aavqe", optimizer="lbfgs", seed=1,
        ).validate()
    ).row
    assert abs(row["e_fci"] - sidecar["e_fci"]) <= 1e-6
    assert row["abs_error"] <= 1.6e-3
    assert row["chem_acc_met"] is True
    report(
        f"chemical-accuracy r={r_label}",
        f"(|E - E_FCI| = {row['abs_error']:.2e} hartree)",
    )


def test_criterion_zero_gradient_guard(tmp_path):
    """HEA(8 layers, 8 qubits) at the HF parameters with the Fock H0 and the
    molecular H1 has |grad|_inf <= 1e-8 at t in {0, 0.5, 1}, and `run`
    refuses with exit code 3 unless the unchecked flag is set."""
    fdump, _ = golden("1.326")
    data = parse_fcidump_file(fdump)
    h1 = qubit_hamiltonian(data)
    h0 = fock_hamiltonian(data.orbital_energies, 8)
    f = EnergyFunctional(build_hea(8, 8), h0, h1, LINEAR)
    theta = hf_params_for_hea(8, 8, hf_bitstring(4, 8))
    worst = 0.0
    for t in (0.0, 0.5, 1.0):
        worst = max(worst, float(np.max(np.abs(f.gradient(theta, t)))))
    assert worst <= 1e-8

    cfg_text = (
        f"fcidump = {fdump}\nr = 1.326\ninitial = fock\nansatz = hea\nlayers = 8\n"
        "steps = 1\nmethod = aavqe\noptimizer = nsgd\nnsgd_epochs = 2\nseed = 0\n"
    )
    cfg_path = tmp_path / "guard.cfg"
    cfg_path.write_text(cfg_text)
    runner = CliRunner()
    refused = runner.invoke(cli_main, ["run", "--config", str(cfg_path),
                                       "--out", str(tmp_path / "o")])
    assert refused.exit_code == 3
    allowed = runner.invoke(cli_main, ["run", "--config", str(cfg_path),
                                       "--out", str(tmp_path / "o"), "--unchecked"])
    assert allowed.exit_code == 0, allowed.output
    report("zero-gradient-guard", f"(|grad|_inf = {worst:.1e}, exit codes 3/0)")


def test_criterion_aavqe_benefit():
    """At r = 3.0 with HEA(8) and N-SGD over 5 fixed seeds, the AAVQE(steps=5)
    median final energy is strictly below the plain VQE(steps=1) median from
    the same |+>^n starts.  Medians are regression-frozen from the first
    derivation with this code."""
    fdump, _ = golden("3.000")
    plain, aavqe5 = [], []
    for seed in range(5):
        base = dict(
            fcidump=fdump, r=3.0, initial="transverse", ansatz="hea", layers=8,
            method="aavqe", optimizer="nsgd", nsgd_epochs=100, seed=seed,
        )
        plain.append(run_experiment(ExperimentConfig(**base, steps=1).validate()).row["e_final"])
        aavqe5.append(run_experiment(ExperimentConfig(**base, steps=5).validate()).row["e_final"])
    med_plain = statistics.median(plain)
    med_aavqe = statistics.median(aavqe5)
    assert med_aavqe < med_plain
    # frozen after first derivation (deterministic seeds)
    assert med_plain == pytest.approx(-14.70522705995372, abs=1e-9)
    assert med_aavqe == pytest.approx(-14.75486474246862, abs=1e-9)

    # the Fock/HF start sits in the zero-gradient trap; with the guard
    # overridden the continuation may not do worse than the single-step run
    base = dict(
        fcidump=fdump, r=3.0, initial="fock", ansatz="hea", layers=8,
        method="aavqe", optimizer="nsgd", nsgd_epochs=100, seed=0, unchecked=True,
    )
    e1 = run_experiment(ExperimentConfig(**base, steps=1).validate()).row["e_final"]
    e5 = run_experiment(ExperimentConfig(**base, steps=5).validate()).row["e_final"]
    assert e5 <= e1 + 1e-12
    report(
        "aavqe-benefit",
        f"(medians: AAVQE(5) {med_aavqe:.6f} < VQE(1) {med_plain:.6f})",
    )


def test_criterion_schedule_machinery():
    """Cubic and linear schedules produce valid traces for steps 5..10 with
    s and sdot matching the closed forms exactly; the cubic-vs-linear
    direction is reported, not asserted."""
    finals = {"linear": [], "cubic": []}
    for kind in ("linear", "cubic"):
        sched = make_schedule(kind)
        for steps in range(5, 11):
            f = one_qubit_functional(sched)
            theta, trace = run(
                ContinuationProblem(f, steps, np.zeros(1)),
                method_by_name("g-aqc-pqc-vqe"),
            )
            assert len(trace.records) == steps
            for rec in trace.records:
                want_s = rec.t if kind == "linear" else 1.0 - (1.0 - rec.t) ** 3
                assert rec.s == pytest.approx(want_s, abs=0.0)
            assert abs(trace.records[-1].energy - (-1.0)) <= 1e-8
            finals[kind].append(abs(theta[0] - math.pi / 2))
    # directional comparison is reported, not asserted: the cubic-vs-linear
    # effect is small and geometry-dependent
    mean_lin = float(np.mean(finals["linear"]))
    mean_cub = float(np.mean(finals["cubic"]))
    report(
        "schedule-machinery",
        f"(mean |theta err| linear {mean_lin:.2e} vs cubic {mean_cub:.2e}; "
        "directional claim recorded, not asserted)",
    )


def test_criterion_chemistry_oracle_equivalence():
    """JW-mapped Hamiltonians match determinant-basis spectra to 1e-9 for up
    to 3 spatial orbitals; canonical anticommutation holds exactly."""
    rng = np.random.default_rng(7)
    for n_orb in (1, 2, 3):
        data = random_integral_data(rng, n_orb, n_orb)
        fo = build_active_hamiltonian(data)
        jw_vals = np.linalg.eigvalsh(to_dense_matrix(jordan_wigner_hermitian(fo, 2 * n_orb)))
        det_vals = np.linalg.eigvalsh(fermion_dense(fo, 2 * n_orb))
        assert np.max(np.abs(jw_vals - det_vals)) <= 1e-9

    from adiapath.chemistry import FermionOperator, jordan_wigner

    n = 3
    for i in range(n):
        for j in range(n):
            ai = to_dense_matrix(jordan_wigner(FermionOperator.term([(i, False)]), n))
            ajd = to_dense_matrix(jordan_wigner(FermionOperator.term([(j, True)]), n))
            anti = ai @ ajd + ajd @ ai
            want = np.eye(2 ** n) if i == j else np.zeros((2 ** n, 2 ** n))
            assert np.array_equal(anti, want)
    report("chemistry-oracle-equivalence")


def test_criterion_continuation_bookkeeping():
    """Named-method dispatch equivalences produce identical traces under fixed
    seeds: named aavqe == explicit (none, vqe); steps=1 aavqe == plain-vqe."""
    from adiapath.optimizers import NsgdConfig

    def run_with(cfg, steps=1):
        f = one_qubit_functional()
        return run(ContinuationProblem(f, steps, np.zeros(1)), cfg)

    nsgd = NsgdConfig(epochs=25, seed=99)
    _, tr_named = run_with(method_by_name("aavqe", nsgd))
    _, tr_explicit = run_with(MethodConfig(predictor="none", corrector=nsgd))
    _, tr_plain = run_with(method_by_name("plain-vqe", nsgd))

    def comparable(trace):
        return [
            (r.step, r.t, r.s, r.theta_after_predictor, r.theta_after_corrector, r.energy)
            for r in trace.records
        ]

    assert comparable(tr_named) == comparable(tr_explicit) == comparable(tr_plain)

    mapping = {
        "aavqe": ("none", True), "vaqc": ("euler_pinv", True),
        "aqc-pqc": ("aqcpqc_constrained", False), "g-aqc-pqc": ("lbfgs_newton", False),
        "g-aqc-pqc-vqe": ("lbfgs_newton", True),
    }
    for name, (predictor, has_corrector) in mapping.items():
        cfg = method_by_name(name)
        assert cfg.predictor == predictor
        assert (cfg.corrector is not None) == has_corrector
    report("continuation-bookkeeping")
