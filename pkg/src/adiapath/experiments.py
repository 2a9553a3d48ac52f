"""Reproducible experiment driver: single runs, grids, and plot tables.

A cell (one run) is identified by the stable hash of its canonical
configuration, which keys the on-disk resume index and the per-cell seed
derivation, so reordering a grid or resuming a sweep cannot change any
result.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ansatz import build_hea, build_uccsd, hf_params_for_hea, plus_params_for_hea
from .chemistry import (
    fock_hamiltonian,
    hf_bitstring,
    parse_fcidump_file,
    qubit_hamiltonian,
    transverse_hamiltonian,
)
from .continuation import ContinuationProblem, MethodConfig, run, method_by_name
from .derivatives import EnergyFunctional
from .errors import ConfigError, GuardError
from .optimizers import LbfgsConfig, NsgdConfig, lbfgs_minimize
from .paulis import load_observable, to_dense_matrix
from .schedules import make_schedule

CHEMICAL_ACCURACY = 1.6e-3  # hartree

METHODS = ("plain-vqe", "aavqe", "vaqc", "aqc-pqc", "g-aqc-pqc", "g-aqc-pqc-vqe")

RESULT_COLUMNS = [
    "cell", "fcidump", "hamiltonian_json", "r", "initial", "ansatz", "layers",
    "schedule", "steps", "method", "optimizer", "nsgd_epochs",
    "nsgd_learning_rate", "nsgd_gamma", "lbfgs_grad_tol", "lbfgs_max_iter",
    "negative_curvature_abort", "literal_ordering", "exact_hvp", "seed",
    "repetition", "unchecked", "oracle", "e_final", "e_fci", "abs_error",
    "chem_acc_met", "wall_time_s", "predictor_calls", "corrector_calls",
    "energy_evals",
]


@dataclass
class ExperimentConfig:
    fcidump: str | None = None
    hamiltonian_json: str | None = None
    r: float | None = None
    initial: str = "fock"            # fock | transverse
    ansatz: str = "uccsd"            # hea | uccsd
    layers: int = 8
    schedule: str = "linear"
    steps: int = 1
    method: str = "aavqe"
    optimizer: str = "lbfgs"         # corrector optimizer: lbfgs | nsgd
    nsgd_epochs: int = 100
    nsgd_learning_rate: float = 0.01
    nsgd_gamma: float = 0.55
    lbfgs_grad_tol: float = 1e-8
    lbfgs_max_iter: int = 400
    negative_curvature_abort: bool = False
    literal_ordering: bool = False
    exact_hvp: bool = False
    pinv_cutoff: float = 1e-8
    psd_tol: float = 1e-8
    seed: int = 0
    repetition: int = 0
    unchecked: bool = False
    oracle: bool = True

    def validate(self) -> "ExperimentConfig":
        if (self.fcidump is None) == (self.hamiltonian_json is None):
            raise ConfigError("exactly one of fcidump/hamiltonian_json must be set")
        if self.initial not in ("fock", "transverse"):
            raise ConfigError(f"unknown initial Hamiltonian {self.initial!r}")
        if self.ansatz not in ("hea", "uccsd"):
            raise ConfigError(f"unknown ansatz {self.ansatz!r}")
        if self.schedule not in ("linear", "cubic"):
            raise ConfigError(f"unknown schedule {self.schedule!r}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; known: {METHODS}")
        if self.optimizer not in ("lbfgs", "nsgd"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        return self

    def canonical(self) -> dict:
        return dataclasses.asdict(self)

    def cell_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def derive_cell_seed(master_seed: int, cfg: ExperimentConfig) -> int:
    """Stable per-cell seed: hash of the config identity and the master seed.

    Grid reordering cannot change per-cell seeds.
    """
    payload = dict(cfg.canonical())
    payload.pop("seed", None)
    blob = json.dumps(payload, sort_keys=True) + f"|{master_seed}"
    return int.from_bytes(hashlib.sha256(blob.encode()).digest()[:8], "big") >> 1


def _corrector_config(cfg: ExperimentConfig):
    if cfg.optimizer == "lbfgs":
        return LbfgsConfig(grad_tol=cfg.lbfgs_grad_tol, max_iter=cfg.lbfgs_max_iter)
    return NsgdConfig(
        epochs=cfg.nsgd_epochs,
        learning_rate=cfg.nsgd_learning_rate,
        gamma=cfg.nsgd_gamma,
        seed=cfg.seed,
    )


def _method_config(cfg: ExperimentConfig) -> MethodConfig:
    return method_by_name(
        cfg.method,
        _corrector_config(cfg),
        negative_curvature_abort=cfg.negative_curvature_abort,
        literal_ordering=cfg.literal_ordering,
        exact_hvp=cfg.exact_hvp,
        pinv_cutoff=cfg.pinv_cutoff,
        psd_tol=cfg.psd_tol,
    )


def _build_problem(cfg: ExperimentConfig):
    """Materialize (functional, theta0, n_qubits, reference info) from a config."""
    if cfg.fcidump is not None:
        data = parse_fcidump_file(cfg.fcidump)
        h1 = qubit_hamiltonian(data)
        n_qubits = data.n_spin_orbitals
        n_electrons = data.n_electrons
        orbital_energies = data.orbital_energies
    else:
        h1 = load_observable(cfg.hamiltonian_json)
        n_qubits = h1.n_qubits
        n_electrons = None
        orbital_energies = None

    if cfg.initial == "fock":
        if orbital_energies is None:
            raise ConfigError(
                "Fock initialization needs orbital energies (ORBENERGIES extension "
                "of the FCIDUMP source)"
            )
        h0 = fock_hamiltonian(orbital_energies, n_qubits)
    else:
        h0 = transverse_hamiltonian(n_qubits)

    schedule = make_schedule(cfg.schedule)

    if cfg.ansatz == "hea":
        circuit = build_hea(n_qubits, cfg.layers)
    else:
        if n_electrons is None:
            raise ConfigError("uccsd needs an FCIDUMP source (electron count)")
        circuit = build_uccsd(n_qubits // 2, n_electrons, hf_bitstring(n_electrons, n_qubits))

    functional = EnergyFunctional(circuit, h0, h1, schedule)

    if cfg.initial == "fock":
        if cfg.ansatz == "hea":
            theta0 = hf_params_for_hea(n_qubits, cfg.layers, hf_bitstring(n_electrons, n_qubits))
        else:
            theta0 = np.zeros(circuit.n_params)
    elif cfg.ansatz == "hea":
        # exact transverse ground state |+>^n via the terminal Ry layer
        theta0 = plus_params_for_hea(n_qubits, cfg.layers)
    else:
        # UCCSD conserves particle number and cannot reach |+>^n; relax to
        # the nearest stationary point of H0 within the ansatz manifold
        pre = lbfgs_minimize(
            lambda th: (functional.energy(th, 0.0), functional.gradient(th, 0.0)),
            np.zeros(circuit.n_params),
            LbfgsConfig(max_iter=2000),
        )
        theta0 = pre.theta
    return functional, theta0


def check_gradient_guard(functional: EnergyFunctional, theta0, tol: float = 1e-6) -> None:
    """Refuse runs whose start violates the stationarity contract or sits in
    the zero-gradient trap (gradient vanishing at both endpoints forces it
    to vanish for every t, stalling all gradient-informed updates)."""
    g0 = float(np.max(np.abs(functional.gradient(theta0, 0.0))))
    if g0 > tol:
        raise GuardError(
            f"theta0 is not stationary for H0: |grad(0)|_inf = {g0:.3g} > {tol:g} "
            "(set unchecked to override)"
        )
    g1 = float(np.max(np.abs(functional.gradient(theta0, 1.0))))
    if g1 <= tol:
        raise GuardError(
            f"zero-gradient trap: |grad|_inf = {g0:.3g} at t=0 and {g1:.3g} at t=1, "
            "so the gradient vanishes for every t "
            "(set unchecked to override)"
        )


@dataclass
class ExperimentOutput:
    row: dict
    trace_jsonl: str
    trace_csv: str


def run_experiment(cfg: ExperimentConfig) -> ExperimentOutput:
    cfg.validate()
    started = time.perf_counter()
    functional, theta0 = _build_problem(cfg)

    if not cfg.unchecked:
        check_gradient_guard(functional, theta0)

    exact_fn = None
    e_fci = None
    if cfg.oracle:
        m0 = to_dense_matrix(functional.h0)
        m1 = to_dense_matrix(functional.h1)
        sched = functional.schedule

        def exact_fn(t):
            s = sched.s(t)
            return float(np.linalg.eigvalsh((1.0 - s) * m0 + s * m1)[0])

        e_fci = float(np.linalg.eigvalsh(m1)[0])

    method = _method_config(cfg)
    problem = ContinuationProblem(functional, cfg.steps, theta0, unchecked=True)
    theta_final, trace = run(problem, method, exact_energy=exact_fn)

    e_final = trace.records[-1].energy
    abs_error = abs(e_final - e_fci) if e_fci is not None else None
    row = dict(cfg.canonical())
    row.update(
        cell=cfg.cell_hash(),
        e_final=e_final,
        e_fci=e_fci,
        abs_error=abs_error,
        chem_acc_met=(abs_error <= CHEMICAL_ACCURACY) if abs_error is not None else None,
        wall_time_s=time.perf_counter() - started,
        predictor_calls=cfg.steps if method.predictor != "none" else 0,
        corrector_calls=cfg.steps if method.corrector is not None else 0,
        energy_evals=functional.energy_evals,
    )
    trace.config["experiment"] = cfg.canonical()
    return ExperimentOutput(row=row, trace_jsonl=trace.to_jsonl(),
                            trace_csv=trace.summary_csv())


def format_row(row: dict) -> str:
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return f"{v:.12g}"
        return str(v)

    return ",".join(fmt(row.get(c)) for c in RESULT_COLUMNS)


def result_header() -> str:
    return ",".join(RESULT_COLUMNS)


# ---------------------------------------------------------------------------
# sweeps


def expand_grid(axes: dict) -> list[dict]:
    """Cross product of config axes; values may be lists."""
    combos: list[dict] = [{}]
    for key in sorted(axes):
        vals = axes[key]
        if not isinstance(vals, (list, tuple)):
            vals = [vals]
        combos = [{**c, key: v} for c in combos for v in vals]
    return combos


def _run_cell(payload):
    cfg_dict, out_dir = payload
    cfg = ExperimentConfig(**cfg_dict)
    cell = cfg.cell_hash()
    out = Path(out_dir)
    try:
        result = run_experiment(cfg)
    except Exception as exc:  # cell failures recorded, sweep continues
        (out / "cells" / f"{cell}.error.json").write_text(
            json.dumps({"config": cfg.canonical(), "error": str(exc)}, indent=1)
        )
        return cell, None
    (out / "traces" / f"{cell}.jsonl").write_text(result.trace_jsonl)
    (out / "traces" / f"{cell}.csv").write_text(result.trace_csv)
    (out / "cells" / f"{cell}.json").write_text(json.dumps(result.row, indent=1))
    return cell, result.row


def sweep(axes: dict, out_dir, master_seed: int = 0, jobs: int = 1,
          repetitions: int = 1) -> tuple[list[dict], int]:
    """Run the cross product of `axes`; returns (rows, n_failures).

    Completed cells (cells/<hash>.json) are skipped, so an interrupted
    sweep resumes to an identical table.  Each cell's seed derives from the
    master seed and the cell identity.
    """
    out = Path(out_dir)
    (out / "cells").mkdir(parents=True, exist_ok=True)
    (out / "traces").mkdir(parents=True, exist_ok=True)

    cell_cfgs = []
    for combo in expand_grid(axes):
        for rep in range(repetitions):
            cfg = ExperimentConfig(**combo, repetition=rep)
            cfg.seed = derive_cell_seed(master_seed, cfg)
            cfg.validate()
            cell_cfgs.append(cfg)

    pending = []
    rows = []
    for cfg in cell_cfgs:
        done_file = out / "cells" / f"{cfg.cell_hash()}.json"
        if done_file.exists():
            rows.append(json.loads(done_file.read_text()))
        else:
            pending.append((cfg.canonical(), str(out)))

    failures = 0
    if pending:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for _cell, row in pool.map(_run_cell, pending):
                    if row is None:
                        failures += 1
                    else:
                        rows.append(row)
        else:
            for payload in pending:
                _cell, row = _run_cell(payload)
                if row is None:
                    failures += 1
                else:
                    rows.append(row)

    rows.sort(key=lambda r: r["cell"])
    csv_text = result_header() + "\n" + "".join(format_row(r) + "\n" for r in rows)
    (out / "results.csv").write_text(csv_text)
    return rows, failures


# ---------------------------------------------------------------------------
# plot tables

REGIMES = (
    ("near-equilibrium", 1.326, 2.0),
    ("intermediate", 2.0, 2.7),
    ("far-dissociation", 2.7, 3.4),
)


def regime_of(r: float) -> str:
    for name, lo, hi in REGIMES:
        if lo <= r < hi:
            return name
    return "outside"


def emit_plotdata(rows: list[dict], kind: str) -> str:
    """Tidy long-format CSV for one plot family; no rendering here."""
    if not rows:
        raise ConfigError("empty result table")
    if kind == "dissociation_curve":
        out = ["r,method,e_final,e_fci,abs_error"]
        for row in sorted(rows, key=lambda r: (float(r["r"]), r["method"])):
            out.append(
                f"{row['r']},{row['method']},{row['e_final']:.12g},"
                f"{row['e_fci']:.12g},{row['abs_error']:.12g}"
            )
        return "\n".join(out) + "\n"
    if kind == "heatmap":
        out = ["layers,r,error_mha"]
        for row in sorted(rows, key=lambda r: (int(r["layers"]), float(r["r"]))):
            out.append(f"{row['layers']},{row['r']},{1000.0 * row['abs_error']:.12g}")
        return "\n".join(out) + "\n"
    if kind == "boxplot_summary":
        groups: dict[tuple[str, str], list[float]] = {}
        for row in rows:
            key = (regime_of(float(row["r"])), row["method"])
            groups.setdefault(key, []).append(float(row["abs_error"]))
        out = ["regime,method,median,q1,q3"]
        for (regime, method), errs in sorted(groups.items()):
            arr = np.asarray(errs)
            out.append(
                f"{regime},{method},{np.median(arr):.12g},"
                f"{np.percentile(arr, 25):.12g},{np.percentile(arr, 75):.12g}"
            )
        return "\n".join(out) + "\n"
    raise ConfigError(f"unknown plotdata kind {kind!r}")
