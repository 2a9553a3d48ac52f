"""Command line driver.

Verbs: run (single config), sweep (grid file), plotdata (aggregation),
gap (spectral-gap profile export), hamiltonian (FCIDUMP -> cached JSON).
Exit codes: 0 success, 2 configuration error, 3 zero-gradient guard
refusal, 4 sweep completed with cell failures.

Config files are key = value text, one pair per line, # comments.  In
sweep mode a value may be a comma-separated list, and the cross product of
all list-valued keys is executed.  Environment overrides: ADIAPATH_OUT
(output directory), ADIAPATH_JOBS (sweep parallelism); nothing else is
read from the environment.
"""
from __future__ import annotations

import csv
import json
import os
import sys
from pathlib import Path

import click

from .chemistry import (
    fock_hamiltonian,
    hf_bitstring,
    parse_fcidump_file,
    qubit_hamiltonian,
    transverse_hamiltonian,
)
from .errors import AdiapathError, ConfigError, GuardError
from .exact import gap_profile, gap_profile_csv, ground_state, ratio_diagnostic
from .experiments import (
    ExperimentConfig,
    emit_plotdata,
    format_row,
    result_header,
    run_experiment,
    sweep as run_sweep,
)
from .paulis import save_observable
from .schedules import make_schedule
from .simulator import expectation, init_basis

_BOOL_KEYS = {"negative_curvature_abort", "literal_ordering", "exact_hvp", "unchecked", "oracle"}
_INT_KEYS = {"layers", "steps", "nsgd_epochs", "lbfgs_max_iter", "seed", "repetitions"}
_FLOAT_KEYS = {"r", "nsgd_learning_rate", "nsgd_gamma", "lbfgs_grad_tol",
               "pinv_cutoff", "psd_tol"}
_STR_KEYS = {"fcidump", "hamiltonian_json", "initial", "ansatz", "schedule",
             "method", "optimizer"}
_ALL_KEYS = _BOOL_KEYS | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def _coerce(key: str, token: str):
    token = token.strip()
    if key in _BOOL_KEYS:
        if token.lower() in ("true", "1", "yes"):
            return True
        if token.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"bad boolean for {key}: {token!r}")
    if key in _INT_KEYS:
        return int(token)
    if key in _FLOAT_KEYS:
        return float(token)
    return token


def parse_config_text(text: str, allow_lists: bool) -> dict:
    out: dict = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        tokens = [t for t in value.split(",") if t.strip()] if allow_lists else [value]
        vals = [_coerce(key, t) for t in tokens]
        out[key] = vals if (allow_lists and len(vals) > 1) else vals[0]
    return out


def _exit_for(exc: Exception) -> int:
    if isinstance(exc, GuardError):
        return 3
    return 2


@click.group()
def main():
    """Adiabatically-inspired continuation experiments."""


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@click.option("--seed", default=None, type=int, help="Override the config seed.")
@click.option("--oracle/--no-oracle", default=None, help="Toggle the exact-energy oracle.")
@click.option("--unchecked", is_flag=True, default=False,
              help="Skip the zero-gradient guard.")
def cmd_run(config_path, out_dir, seed, oracle, unchecked):
    """Run a single experiment from a config file."""
    out_dir = out_dir or os.environ.get("ADIAPATH_OUT", "runs")
    try:
        fields = parse_config_text(Path(config_path).read_text(), allow_lists=False)
        fields.pop("repetitions", None)
        if seed is not None:
            fields["seed"] = seed
        if oracle is not None:
            fields["oracle"] = oracle
        if unchecked:
            fields["unchecked"] = True
        cfg = ExperimentConfig(**fields).validate()
        result = run_experiment(cfg)
    except AdiapathError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    cell = result.row["cell"]
    (out / "traces" / f"{cell}.jsonl").write_text(result.trace_jsonl)
    (out / "traces" / f"{cell}.csv").write_text(result.trace_csv)
    results_csv = out / "results.csv"
    if not results_csv.exists():
        results_csv.write_text(result_header() + "\n")
    with results_csv.open("a") as fh:
        fh.write(format_row(result.row) + "\n")
    click.echo(
        f"cell={cell} E_final={result.row['e_final']:.10f}"
        + (
            f" E_FCI={result.row['e_fci']:.10f} abs_error={result.row['abs_error']:.3e}"
            f" chem_acc={'yes' if result.row['chem_acc_met'] else 'no'}"
            if result.row["e_fci"] is not None
            else ""
        )
    )


@main.command("sweep")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@click.option("--seed", default=0, type=int, help="Master seed; cells derive their own.")
@click.option("--jobs", default=None, type=int)
def cmd_sweep(config_path, out_dir, seed, jobs):
    """Run the cross product of a grid config file (resumable)."""
    out_dir = out_dir or os.environ.get("ADIAPATH_OUT", "runs")
    jobs = jobs if jobs is not None else int(os.environ.get("ADIAPATH_JOBS", "1"))
    try:
        axes = parse_config_text(Path(config_path).read_text(), allow_lists=True)
        repetitions = axes.pop("repetitions", 1)
        if isinstance(repetitions, list):
            raise ConfigError("repetitions cannot be a sweep axis")
        rows, failures = run_sweep(axes, out_dir, master_seed=seed, jobs=jobs,
                                   repetitions=repetitions)
    except AdiapathError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))
    click.echo(f"{len(rows)} cells completed, {failures} failed -> {out_dir}/results.csv")
    if failures:
        sys.exit(4)


@main.command("plotdata")
@click.option("--results", "results_path", required=True, type=click.Path(exists=True))
@click.option("--kind", required=True,
              type=click.Choice(["dissociation_curve", "heatmap", "boxplot_summary"]))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cmd_plotdata(results_path, kind, out_path):
    """Aggregate a results.csv into a tidy plot-ready CSV."""
    with open(results_path) as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            if not raw.get("abs_error"):
                continue
            rows.append(
                {
                    "r": float(raw["r"]),
                    "method": raw["method"],
                    "layers": int(raw["layers"]),
                    "e_final": float(raw["e_final"]),
                    "e_fci": float(raw["e_fci"]),
                    "abs_error": float(raw["abs_error"]),
                }
            )
    try:
        text = emit_plotdata(rows, kind)
    except AdiapathError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    Path(out_path).write_text(text)
    click.echo(f"wrote {out_path}")


@main.command("gap")
@click.option("--fcidump", "fcidump_path", required=True, type=click.Path(exists=True))
@click.option("--initial", default="fock", type=click.Choice(["fock", "transverse"]))
@click.option("--schedule", "schedule_kind", default="linear",
              type=click.Choice(["linear", "cubic"]))
@click.option("--resolution", default=101, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cmd_gap(fcidump_path, initial, schedule_kind, resolution, out_path):
    """Export the spectral-gap profile g(s(t)) of the interpolation path."""
    try:
        data = parse_fcidump_file(fcidump_path)
        h1 = qubit_hamiltonian(data)
        if initial == "fock":
            if data.orbital_energies is None:
                raise ConfigError("FCIDUMP lacks ORBENERGIES; cannot build the Fock H0")
            h0 = fock_hamiltonian(data.orbital_energies, data.n_spin_orbitals)
        else:
            h0 = transverse_hamiltonian(data.n_spin_orbitals)
        schedule = make_schedule(schedule_kind)
        rows = gap_profile(h0, h1, schedule, resolution)
        sup, t_at = ratio_diagnostic(h0, h1, schedule, resolution)
    except AdiapathError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))
    Path(out_path).write_text(gap_profile_csv(rows))
    gmin = min(g for _, _, g in rows)
    click.echo(f"min_gap={gmin:.8f} adiabatic_ratio_sup={sup:.8f} at t={t_at:.4f}")


@main.command("hamiltonian")
@click.option("--fcidump", "fcidump_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--oracle/--no-oracle", default=False,
              help="Also diagonalize and report reference energies.")
def cmd_hamiltonian(fcidump_path, out_path, oracle):
    """Map an FCIDUMP to the cached qubit-observable JSON format."""
    try:
        data = parse_fcidump_file(fcidump_path)
        h1 = qubit_hamiltonian(data)
    except AdiapathError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    save_observable(h1, out_path)
    click.echo(f"n_qubits={h1.n_qubits} terms={len(h1.terms)} -> {out_path}")
    if oracle:
        e_fci, _ = ground_state(h1)
        ref = init_basis(h1.n_qubits, hf_bitstring(data.n_electrons, h1.n_qubits))
        e_hf = expectation(ref, h1)
        meta = {"e_fci": e_fci, "e_hf": e_hf, "n_terms": len(h1.terms)}
        Path(str(out_path) + ".meta.json").write_text(json.dumps(meta, indent=1))
        click.echo(f"e_fci={e_fci:.12f} e_hf={e_hf:.12f}")


if __name__ == "__main__":
    main()
