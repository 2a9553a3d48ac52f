import csv
import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from adiapath.cli import main, parse_config_text
from adiapath.errors import ConfigError, GuardError
from adiapath.experiments import (
    ExperimentConfig,
    derive_cell_seed,
    emit_plotdata,
    expand_grid,
    run_experiment,
    sweep,
)

DATA = Path(__file__).resolve().parent.parent / "data" / "beh2"
EQ_FCIDUMP = str(DATA / "beh2_r1.326.fcidump")
EQ_SIDECAR = json.loads((DATA / "beh2_r1.326.json").read_text())


def small_cfg(**kw) -> ExperimentConfig:
    base = dict(
        fcidump=EQ_FCIDUMP,
        r=1.326,
        initial="fock",
        ansatz="uccsd",
        schedule="linear",
        steps=1,
        method="aavqe",
        optimizer="lbfgs",
        seed=3,
    )
    base.update(kw)
    return ExperimentConfig(**base).validate()


class TestConfig:
    def test_validation_rejects_double_source(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(fcidump="a", hamiltonian_json="b").validate()

    def test_validation_rejects_unknown_method(self):
        with pytest.raises(ConfigError):
            small_cfg(method="newton")

    def test_cell_hash_stable(self):
        assert small_cfg().cell_hash() == small_cfg().cell_hash()
        assert small_cfg().cell_hash() != small_cfg(seed=4).cell_hash()

    def test_derived_seed_ignores_order(self):
        a = derive_cell_seed(7, small_cfg())
        b = derive_cell_seed(7, small_cfg())
        assert a == b
        assert derive_cell_seed(8, small_cfg()) != a

    def test_parse_config_text(self):
        text = "# comment\nfcidump = x\nsteps = 4\noracle = false\n"
        parsed = parse_config_text(text, allow_lists=False)
        assert parsed == {"fcidump": "x", "steps": 4, "oracle": False}

    def test_parse_config_lists(self):
        parsed = parse_config_text("steps = 1, 2, 3\nmethod = aavqe\n", allow_lists=True)
        assert parsed["steps"] == [1, 2, 3]
        assert parsed["method"] == "aavqe"

    def test_parse_rejects_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config_text("banana = 3\n", allow_lists=False)

    def test_expand_grid(self):
        combos = expand_grid({"steps": [1, 2], "method": ["aavqe"]})
        assert len(combos) == 2


class TestRunExperiment:
    def test_uccsd_plain_vqe_chemical_accuracy(self):
        out = run_experiment(small_cfg())
        row = out.row
        assert row["e_fci"] == pytest.approx(EQ_SIDECAR["e_fci"], abs=1e-6)
        assert row["abs_error"] <= 1.6e-3
        assert row["chem_acc_met"] is True
        assert row["energy_evals"] > 0

    def test_determinism_minus_wall_time(self):
        r1 = run_experiment(small_cfg(optimizer="nsgd", nsgd_epochs=10)).row
        r2 = run_experiment(small_cfg(optimizer="nsgd", nsgd_epochs=10)).row
        for key in r1:
            if key == "wall_time_s":
                continue
            assert r1[key] == r2[key], key

    def test_guard_fires_for_hea_fock(self):
        with pytest.raises(GuardError):
            run_experiment(small_cfg(ansatz="hea", layers=2, optimizer="nsgd",
                                     nsgd_epochs=5))

    def test_guard_unchecked_runs(self):
        out = run_experiment(
            small_cfg(ansatz="hea", layers=1, optimizer="nsgd", nsgd_epochs=2,
                      unchecked=True)
        )
        assert out.row["e_final"] is not None

    def test_fock_requires_orbital_energies(self, tmp_path):
        stripped = tmp_path / "no_orbe.fcidump"
        text = Path(EQ_FCIDUMP).read_text()
        stripped.write_text("\n".join(
            ln for ln in text.splitlines() if not ln.startswith("#")
        ) + "\n")
        with pytest.raises(ConfigError):
            run_experiment(small_cfg(fcidump=str(stripped)))

    def test_oracle_off_leaves_blank(self):
        row = run_experiment(small_cfg(oracle=False)).row
        assert row["e_fci"] is None and row["abs_error"] is None

    def test_abs_error_reproducible_from_cached_hamiltonian(self):
        # oracle re-check: abs_error must be |e_final - ground_state(H1)|
        from adiapath.chemistry import parse_fcidump_file, qubit_hamiltonian
        from adiapath.exact import ground_energy

        row = run_experiment(small_cfg()).row
        e_fci = ground_energy(qubit_hamiltonian(parse_fcidump_file(row["fcidump"])))
        assert row["abs_error"] == pytest.approx(abs(row["e_final"] - e_fci), abs=1e-12)


class TestSweep:
    def test_sweep_resume_identical(self, tmp_path):
        axes = {
            "fcidump": EQ_FCIDUMP,
            "r": 1.326,
            "ansatz": "uccsd",
            "initial": "fock",
            "method": "aavqe",
            "optimizer": "nsgd",
            "nsgd_epochs": 3,
            "steps": [1, 2],
        }
        rows1, fail1 = sweep(axes, tmp_path / "out", master_seed=5)
        table1 = (tmp_path / "out" / "results.csv").read_text()
        assert fail1 == 0 and len(rows1) == 2
        # delete the table, keep the cells: resume must rebuild identically
        (tmp_path / "out" / "results.csv").unlink()
        rows2, fail2 = sweep(axes, tmp_path / "out", master_seed=5)
        table2 = (tmp_path / "out" / "results.csv").read_text()
        assert fail2 == 0
        assert table1 == table2

    def test_cell_failure_recorded_and_continues(self, tmp_path):
        axes = {
            "fcidump": EQ_FCIDUMP,
            "r": 1.326,
            "ansatz": ["uccsd", "hea"],  # hea+fock trips the guard -> cell failure
            "initial": "fock",
            "method": "aavqe",
            "optimizer": "nsgd",
            "nsgd_epochs": 2,
            "steps": 1,
        }
        rows, failures = sweep(axes, tmp_path / "out", master_seed=1)
        assert failures == 1
        assert len(rows) == 1
        errs = list((tmp_path / "out" / "cells").glob("*.error.json"))
        assert len(errs) == 1

    def test_empty_grid(self, tmp_path):
        rows, failures = sweep({}, tmp_path / "out", repetitions=0)
        assert rows == [] and failures == 0

    def test_parallel_jobs_match_serial(self, tmp_path):
        axes = {
            "fcidump": EQ_FCIDUMP,
            "r": 1.326,
            "ansatz": "uccsd",
            "initial": "fock",
            "method": "aavqe",
            "optimizer": "nsgd",
            "nsgd_epochs": 2,
            "steps": [1, 2],
        }
        sweep(axes, tmp_path / "serial", master_seed=5, jobs=1)
        sweep(axes, tmp_path / "par", master_seed=5, jobs=2)
        serial = (tmp_path / "serial" / "results.csv").read_text()
        par = (tmp_path / "par" / "results.csv").read_text()

        def strip_wall(text):
            idx = text.splitlines()[0].split(",").index("wall_time_s")
            return [
                [c for i, c in enumerate(line.split(",")) if i != idx]
                for line in text.splitlines()
            ]

        assert strip_wall(serial) == strip_wall(par)


class TestPlotData:
    def make_rows(self):
        return [
            {"r": 1.326, "method": "aavqe", "layers": 1, "e_final": -15.58,
             "e_fci": -15.59, "abs_error": 0.01},
            {"r": 3.0, "method": "aavqe", "layers": 2, "e_final": -15.2,
             "e_fci": -15.3, "abs_error": 0.1},
        ]

    def test_dissociation_curve(self):
        text = emit_plotdata(self.make_rows(), "dissociation_curve")
        assert text.splitlines()[0] == "r,method,e_final,e_fci,abs_error"
        assert len(text.strip().splitlines()) == 3

    def test_heatmap(self):
        text = emit_plotdata(self.make_rows(), "heatmap")
        assert text.splitlines()[0] == "layers,r,error_mha"

    def test_boxplot_summary(self):
        text = emit_plotdata(self.make_rows(), "boxplot_summary")
        lines = text.strip().splitlines()
        assert lines[0] == "regime,method,median,q1,q3"
        assert any(ln.startswith("near-equilibrium") for ln in lines)
        assert any(ln.startswith("far-dissociation") for ln in lines)

    def test_empty_rejected(self):
        with pytest.raises(ConfigError):
            emit_plotdata([], "heatmap")


class TestCli:
    def write_cfg(self, tmp_path, **kw):
        base = dict(
            fcidump=EQ_FCIDUMP, r=1.326, initial="fock", ansatz="uccsd",
            schedule="linear", steps=1, method="aavqe", optimizer="lbfgs", seed=3,
        )
        base.update(kw)
        text = "\n".join(f"{k} = {v}" for k, v in base.items())
        path = tmp_path / "run.cfg"
        path.write_text(text + "\n")
        return str(path)

    def test_run_verb(self, tmp_path):
        cfg = self.write_cfg(tmp_path)
        runner = CliRunner()
        result = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path / "o")])
        assert result.exit_code == 0, result.output
        csv_path = tmp_path / "o" / "results.csv"
        assert csv_path.exists()
        with csv_path.open() as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["chem_acc_met"] == "true"
        traces = list((tmp_path / "o" / "traces").glob("*.jsonl"))
        assert len(traces) == 1

    def test_run_guard_exit_code_3(self, tmp_path):
        cfg = self.write_cfg(tmp_path, ansatz="hea", layers=1, optimizer="nsgd",
                             nsgd_epochs=2)
        runner = CliRunner()
        result = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path / "o")])
        assert result.exit_code == 3

    def test_run_guard_unchecked_flag(self, tmp_path):
        cfg = self.write_cfg(tmp_path, ansatz="hea", layers=1, optimizer="nsgd",
                             nsgd_epochs=2)
        runner = CliRunner()
        result = runner.invoke(
            main, ["run", "--config", cfg, "--out", str(tmp_path / "o"), "--unchecked"]
        )
        assert result.exit_code == 0, result.output

    def test_run_config_error_exit_code_2(self, tmp_path):
        cfg = self.write_cfg(tmp_path, method="nonsense")
        runner = CliRunner()
        result = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path / "o")])
        assert result.exit_code == 2

    def test_hamiltonian_verb_round_trip(self, tmp_path):
        runner = CliRunner()
        out_json = tmp_path / "h1.json"
        result = runner.invoke(
            main,
            ["hamiltonian", "--fcidump", EQ_FCIDUMP, "--out", str(out_json), "--oracle"],
        )
        assert result.exit_code == 0, result.output
        from adiapath.paulis import load_observable
        from adiapath.exact import ground_energy

        h1 = load_observable(out_json)
        assert ground_energy(h1) == pytest.approx(EQ_SIDECAR["e_fci"], abs=1e-6)
        meta = json.loads((tmp_path / "h1.json.meta.json").read_text())
        assert meta["e_fci"] == pytest.approx(EQ_SIDECAR["e_fci"], abs=1e-6)
        assert meta["e_hf"] == pytest.approx(EQ_SIDECAR["e_scf"], abs=1e-8)

    def test_cached_json_source_runs(self, tmp_path):
        runner = CliRunner()
        out_json = tmp_path / "h1.json"
        runner.invoke(main, ["hamiltonian", "--fcidump", EQ_FCIDUMP, "--out", str(out_json)])
        row = run_experiment(
            ExperimentConfig(
                hamiltonian_json=str(out_json), r=1.326, initial="transverse",
                ansatz="hea", layers=1, steps=1, method="aavqe", optimizer="lbfgs",
                seed=1, lbfgs_max_iter=40,
            ).validate()
        ).row
        assert row["e_final"] is not None

    def test_gap_verb(self, tmp_path):
        runner = CliRunner()
        out_csv = tmp_path / "gap.csv"
        result = runner.invoke(
            main,
            ["gap", "--fcidump", EQ_FCIDUMP, "--initial", "fock",
             "--schedule", "cubic", "--resolution", "11", "--out", str(out_csv)],
        )
        assert result.exit_code == 0, result.output
        lines = out_csv.read_text().strip().splitlines()
        assert lines[0] == "t,s,gap"
        assert len(lines) == 12
        assert "min_gap=" in result.output

    def test_sweep_verb_and_plotdata(self, tmp_path):
        grid = tmp_path / "grid.cfg"
        grid.write_text(
            f"fcidump = {EQ_FCIDUMP}\nr = 1.326\nansatz = uccsd\ninitial = fock\n"
            "method = aavqe\noptimizer = nsgd\nnsgd_epochs = 2\nsteps = 1, 2\n"
        )
        runner = CliRunner()
        result = runner.invoke(
            main, ["sweep", "--config", str(grid), "--out", str(tmp_path / "o"), "--seed", "9"]
        )
        assert result.exit_code == 0, result.output
        result2 = runner.invoke(
            main,
            ["plotdata", "--results", str(tmp_path / "o" / "results.csv"),
             "--kind", "dissociation_curve", "--out", str(tmp_path / "d.csv")],
        )
        assert result2.exit_code == 0, result2.output
        assert (tmp_path / "d.csv").read_text().startswith("r,method")
