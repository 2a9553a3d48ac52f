"""Homotopy predictor-corrector engine and its named instantiations.

The generic loop tracks minimizers of E(theta, t) from t=0 to t=1 on the
grid {h, 2h, ..., 1}: at each step a predictor extrapolates the parameters
using local derivative information (the Davidenko system
A(theta,t) thetadot + Q(theta,t) = 0), then t advances and an optional VQE
corrector re-optimizes at the new Hamiltonian.

Named methods (predictor, corrector):
    aavqe          (none,               vqe)
    vaqc           (euler_pinv,         vqe)
    aqc-pqc        (aqcpqc_constrained, none)
    g-aqc-pqc      (lbfgs_newton,       none)
    g-aqc-pqc-vqe  (lbfgs_newton,       vqe)
and plain-vqe is the degenerate steps=1 aavqe.
"""
from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .derivatives import EnergyFunctional
from .errors import ContractError, GuardError
from .optimizers import LbfgsConfig, NsgdConfig, OptimizerConfig, two_loop_direction, vqe
from .schedules import Schedule, make_schedule  # noqa: F401  (re-exported)

PREDICTORS = ("none", "euler_pinv", "aqcpqc_constrained", "lbfgs_newton")

METHOD_TABLE = {
    "plain-vqe": ("none", True),
    "aavqe": ("none", True),
    "vaqc": ("euler_pinv", True),
    "aqc-pqc": ("aqcpqc_constrained", False),
    "g-aqc-pqc": ("lbfgs_newton", False),
    "g-aqc-pqc-vqe": ("lbfgs_newton", True),
}

STATIONARITY_TOL = 1e-6


@dataclass
class MethodConfig:
    predictor: str = "none"
    corrector: OptimizerConfig | None = None
    negative_curvature_abort: bool = False
    pinv_cutoff: float = 1e-8      # relative to the largest |eigenvalue|
    psd_tol: float = 1e-8          # hartree/radian^2
    exact_hvp: bool = False        # validation mode: O(p^2) exact Hessian products
    literal_ordering: bool = False  # legacy ordering: correct at the old t, then shift
    cg_tol: float = 1e-10
    cg_maxiter: int | None = None  # default: number of parameters
    lbfgs_seed_history: int = 10   # cross-step curvature pairs kept for the seed

    def __post_init__(self):
        if self.predictor not in PREDICTORS:
            raise ContractError(f"unknown predictor {self.predictor!r}")
        if self.predictor == "none" and self.corrector is None:
            raise ContractError("at least one of predictor/corrector must be active")

    def describe(self) -> dict:
        d = {
            "predictor": self.predictor,
            "corrector": type(self.corrector).__name__ if self.corrector else "none",
            "negative_curvature_abort": self.negative_curvature_abort,
            "pinv_cutoff": self.pinv_cutoff,
            "psd_tol": self.psd_tol,
            "exact_hvp": self.exact_hvp,
            "literal_ordering": self.literal_ordering,
        }
        if self.corrector is not None:
            d["corrector_config"] = dataclasses.asdict(self.corrector)
        return d


def method_by_name(name: str, corrector_config: OptimizerConfig | None = None,
                   **overrides) -> MethodConfig:
    """MethodConfig for a named method; the VQE corrector defaults to L-BFGS."""
    try:
        predictor, wants_corrector = METHOD_TABLE[name]
    except KeyError:
        raise ContractError(f"unknown method {name!r}; known: {sorted(METHOD_TABLE)}") from None
    corrector = (corrector_config or LbfgsConfig()) if wants_corrector else None
    return MethodConfig(predictor=predictor, corrector=corrector, **overrides)


@dataclass
class ContinuationProblem:
    functional: EnergyFunctional
    steps: int
    theta_star0: np.ndarray
    unchecked: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise ContractError("steps must be >= 1")
        self.theta_star0 = np.asarray(self.theta_star0, dtype=float)
        if self.theta_star0.shape != (self.functional.n_params,):
            raise ContractError("theta_star0 length != circuit parameter count")

    @property
    def schedule(self) -> Schedule:
        return self.functional.schedule


@dataclass
class StepRecord:
    step: int
    t: float
    s: float
    theta_before: list
    theta_after_predictor: list
    theta_after_corrector: list
    energy_after_predictor: float
    energy: float
    grad_norm: float
    predictor_norm: float
    predictor_info: dict
    corrector_info: dict
    wall_time_s: float
    energy_evals: int
    e_exact: float | None = None
    abs_error: float | None = None


@dataclass
class RunTrace:
    config: dict
    seeds: dict
    records: list[StepRecord] = field(default_factory=list)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"type": "meta", "config": self.config, "seeds": self.seeds})]
        for r in self.records:
            d = dataclasses.asdict(r)
            d["type"] = "step"
            lines.append(json.dumps(d))
        return "\n".join(lines) + "\n"

    def summary_csv(self, include_wall_time: bool = True) -> str:
        cols = ["step", "t", "s", "energy", "grad_norm", "predictor_norm",
                "e_exact", "abs_error", "energy_evals"]
        if include_wall_time:
            cols.append("wall_time_s")
        rows = [",".join(cols)]
        for r in self.records:
            d = dataclasses.asdict(r)
            rows.append(",".join("" if d[c] is None else f"{d[c]:.12g}" for c in cols))
        return "\n".join(rows) + "\n"


def _pseudo_inverse_solve(a: np.ndarray, rhs: np.ndarray, rel_cutoff: float):
    """Min-norm x with a @ x ~= rhs via symmetric eigendecomposition.

    Returns (x, null_vectors, stalled): eigenvalues at or below
    rel_cutoff * max|eig| count as zero; `stalled` marks an all-zero a
    against a nonzero rhs.
    """
    vals, vecs = np.linalg.eigh(0.5 * (a + a.T))
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale == 0.0:
        return np.zeros_like(rhs), vecs, bool(np.linalg.norm(rhs) > 0)
    keep = np.abs(vals) > rel_cutoff * scale
    inv = np.where(keep, 1.0 / np.where(keep, vals, 1.0), 0.0)
    x = vecs @ (inv * (vecs.T @ rhs))
    return x, vecs[:, ~keep], False


def predictor_euler_pinv(f: EnergyFunctional, theta, t: float, h: float,
                         pinv_cutoff: float = 1e-8):
    """Euler step of the Davidenko system: eps = -pinv(A) Q h."""
    a = f.hessian(theta, t)
    q = f.q_vector(theta, t)
    x, _null, stalled = _pseudo_inverse_solve(a, q, pinv_cutoff)
    info = {"kind": "euler_pinv", "stalled": stalled}
    return -h * x, info


def predictor_aqcpqc(f: EnergyFunctional, theta, t: float, h: float,
                     t_next: float, pinv_cutoff: float = 1e-8,
                     psd_tol: float = 1e-8, max_repair_checks: int = 12):
    """Constrained minimum-norm Davidenko step (exact Hessians).

    Minimizes ||A eps + Qtilde||^2 by the min-norm pseudo-inverse solution,
    then verifies the PSD constraint on the exact Hessian at the shifted
    point under the new Hamiltonian; violations trigger a bounded
    null-space line scan, and an unrepaired violation is flagged, not
    hidden.
    """
    a = f.hessian(theta, t)
    qt = f.q_tilde(theta, t, h)
    x, null_vecs, stalled = _pseudo_inverse_solve(a, qt, pinv_cutoff)
    eps = -x
    info = {"kind": "aqcpqc_constrained", "stalled": stalled,
            "psd_violation": False, "psd_repaired": False, "lambda_min": None}

    def lambda_min(eps_try) -> float:
        h_mat = f.hessian(np.asarray(theta) + eps_try, t_next)
        return float(np.linalg.eigvalsh(h_mat)[0])

    lam = lambda_min(eps)
    info["lambda_min"] = lam
    if lam >= -psd_tol:
        return eps, info
    info["psd_violation"] = True
    scale = max(float(np.linalg.norm(eps)), 0.1)
    checks = 0
    best_eps, best_lam = eps, lam
    for k in range(null_vecs.shape[1]):
        v = null_vecs[:, k]
        for c in (0.25, -0.25, 0.5, -0.5, 1.0, -1.0):
            if checks >= max_repair_checks:
                break
            cand = eps + c * scale * v
            lam_c = lambda_min(cand)
            checks += 1
            if lam_c > best_lam:
                best_eps, best_lam = cand, lam_c
            if lam_c >= -psd_tol:
                info.update(psd_repaired=True, lambda_min=lam_c)
                return cand, info
        if checks >= max_repair_checks:
            break
    info["lambda_min"] = best_lam
    info["psd_violation"] = best_lam < -psd_tol
    return best_eps, info


def predictor_gaqcpqc(f: EnergyFunctional, theta, t: float, h: float,
                      cfg: MethodConfig, seed_history=()):
    """Quasi-Newton Davidenko step without forming the Hessian.

    Solves A eps = -Qtilde by conjugate gradients whose products A v cost
    O(p) energy evaluations each (central difference of parameter-shift
    gradients), seeded with the two-loop L-BFGS direction built from
    curvature pairs accumulated across continuation steps.  When
    negative_curvature_abort is set, a trial direction with d^T A d < 0
    terminates the inner solve and the best iterate so far is returned.
    """
    theta = np.asarray(theta, dtype=float)
    qt = f.q_tilde(theta, t, h)
    p = qt.size
    info = {"kind": "lbfgs_newton", "cg_iterations": 0, "curvature_abort": False,
            "residual": 0.0}
    if float(np.linalg.norm(qt)) == 0.0:
        return np.zeros(p), info

    if cfg.exact_hvp:
        a_exact = f.hessian(theta, t)

        def hvp(v):
            return a_exact @ v
    else:
        def hvp(v):
            return f.hessian_vector_product(theta, t, v)

    b = -qt
    x = two_loop_direction(list(seed_history), qt)  # approx -A^{-1} qt = A^{-1} b
    r = b - hvp(x)
    best_x, best_res = x.copy(), float(np.linalg.norm(r))
    d = r.copy()
    maxiter = cfg.cg_maxiter if cfg.cg_maxiter is not None else p
    tol = cfg.cg_tol * max(float(np.linalg.norm(b)), 1e-30)
    rs = float(np.dot(r, r))
    for k in range(maxiter):
        if rs ** 0.5 <= tol:
            break
        ad = hvp(d)
        dad = float(np.dot(d, ad))
        if dad < 0.0 and cfg.negative_curvature_abort:
            info["curvature_abort"] = True
            break
        if abs(dad) < 1e-300:
            break
        alpha = rs / dad
        x = x + alpha * d
        r = r - alpha * ad
        rs_new = float(np.dot(r, r))
        info["cg_iterations"] = k + 1
        res = rs_new ** 0.5
        if res < best_res:
            best_x, best_res = x.copy(), res
        d = r + (rs_new / rs) * d
        rs = rs_new
    info["residual"] = best_res
    return best_x, info


def _corrector_seed(cfg: OptimizerConfig, step: int) -> OptimizerConfig:
    # derive a per-step N-SGD seed so multi-step noise streams decorrelate
    if isinstance(cfg, NsgdConfig):
        return dataclasses.replace(cfg, seed=(cfg.seed + 1_000_003 * step) % (1 << 63))
    return cfg


def run(problem: ContinuationProblem, cfg: MethodConfig,
        exact_energy: Callable[[float], float] | None = None) -> tuple[np.ndarray, RunTrace]:
    """Execute the predictor-corrector loop and return (theta_final, trace)."""
    f = problem.functional
    theta = np.array(problem.theta_star0, dtype=float)

    if not problem.unchecked:
        g0 = f.gradient(theta, 0.0)
        if float(np.max(np.abs(g0))) > STATIONARITY_TOL:
            raise GuardError(
                f"theta_star0 is not stationary for H0 "
                f"(|grad|_inf = {float(np.max(np.abs(g0))):.3g} > {STATIONARITY_TOL:g}); "
                "pass unchecked=True to override"
            )

    steps = problem.steps
    h = 1.0 / steps
    seeds = {"corrector_base_seed": getattr(cfg.corrector, "seed", None),
             "per_step_rule": "seed + 1000003 * step mod 2^63"}
    trace = RunTrace(config={"steps": steps, "schedule": problem.schedule.kind,
                             **cfg.describe()}, seeds=seeds)
    seed_history: list[tuple[np.ndarray, np.ndarray]] = []

    for step in range(1, steps + 1):
        t_prev = (step - 1) / steps
        t_new = step / steps
        started = time.perf_counter()

        def predict(at_theta):
            if cfg.predictor == "none":
                return np.zeros_like(theta), {"kind": "none"}
            if cfg.predictor == "euler_pinv":
                return predictor_euler_pinv(f, at_theta, t_prev, h, cfg.pinv_cutoff)
            if cfg.predictor == "aqcpqc_constrained":
                return predictor_aqcpqc(f, at_theta, t_prev, h, t_new,
                                        cfg.pinv_cutoff, cfg.psd_tol)
            return predictor_gaqcpqc(f, at_theta, t_prev, h, cfg, seed_history)

        corrector_info: dict = {"kind": "none"}
        theta_before = theta.copy()
        if cfg.literal_ordering:
            # legacy ordering: correct at the old t, then apply the shift
            eps, predictor_info = predict(theta)
            theta_pred = theta + eps
            if cfg.corrector is not None:
                res = vqe(f, t_prev, theta, _corrector_seed(cfg.corrector, step))
                corrector_info = {"kind": type(cfg.corrector).__name__,
                                  "iterations": res.iterations,
                                  "exit_reason": res.exit_reason}
                theta_new = res.theta + eps
            else:
                theta_new = theta_pred
        else:
            eps, predictor_info = predict(theta)
            theta_pred = theta + eps
            if cfg.corrector is not None:
                res = vqe(f, t_new, theta_pred, _corrector_seed(cfg.corrector, step))
                corrector_info = {"kind": type(cfg.corrector).__name__,
                                  "iterations": res.iterations,
                                  "exit_reason": res.exit_reason}
                theta_new = res.theta
            else:
                theta_new = theta_pred

        if cfg.predictor == "lbfgs_newton":
            g_new = f.gradient(theta_new, t_new)
            g_old = f.gradient(theta, t_new)
            s_vec = theta_new - theta
            y_vec = g_new - g_old
            sy = float(np.dot(s_vec, y_vec))
            if sy > 1e-10 * float(np.linalg.norm(s_vec) * np.linalg.norm(y_vec)):
                seed_history.append((s_vec, y_vec))
                if len(seed_history) > cfg.lbfgs_seed_history:
                    seed_history.pop(0)

        energy_new = f.energy(theta_new, t_new)
        energy_pred = f.energy(theta_pred, t_new)
        grad_norm = float(np.max(np.abs(f.gradient(theta_new, t_new))))
        e_exact = abs_err = None
        if exact_energy is not None:
            e_exact = float(exact_energy(t_new))
            abs_err = abs(energy_new - e_exact)
        trace.records.append(StepRecord(
            step=step, t=t_new, s=float(problem.schedule.s(t_new)),
            theta_before=theta_before.tolist(),
            theta_after_predictor=theta_pred.tolist(),
            theta_after_corrector=theta_new.tolist(),
            energy_after_predictor=energy_pred,
            energy=energy_new, grad_norm=grad_norm,
            predictor_norm=float(np.linalg.norm(eps)),
            predictor_info=predictor_info, corrector_info=corrector_info,
            wall_time_s=time.perf_counter() - started,
            energy_evals=f.energy_evals,
            e_exact=e_exact, abs_error=abs_err,
        ))
        theta = np.asarray(theta_new, dtype=float)

    return theta, trace
