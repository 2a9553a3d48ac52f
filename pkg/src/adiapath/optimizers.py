"""Classical optimizers: L-BFGS (predictor and VQE workhorse) and N-SGD.

L-BFGS is the standard two-loop recursion with a strong-Wolfe line search,
initial inverse-Hessian scaling (s.y)/(y.y), and curvature pairs skipped
when s.y <= 1e-10 ||s|| ||y||.  N-SGD is plain gradient descent with
additive per-coordinate Gaussian noise whose variance decays as
eta / (1+t)^gamma; it is a pure function of (objective, x0, config) for a
fixed seed and returns the best iterate seen.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OptimizerError

_PAIR_SKIP = 1e-10


@dataclass
class LbfgsConfig:
    history_size: int = 10
    grad_tol: float = 1e-8
    max_iter: int = 400
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9

    def __post_init__(self):
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.history_size < 1:
            raise ValueError("history_size must be >= 1")


@dataclass
class NsgdConfig:
    epochs: int = 100
    learning_rate: float = 0.01
    gamma: float = 0.55
    seed: int = 0
    noise_scale: float = 1.0  # internal hook; 0 disables noise for tests

    def __post_init__(self):
        if self.learning_rate <= 0 or self.gamma <= 0:
            raise ValueError("learning_rate and gamma must be positive")


@dataclass
class OptimizerResult:
    theta: np.ndarray
    energy: float
    iterations: int
    grad_norm: float
    exit_reason: str  # converged | max_iter | curvature_abort
    objective_calls: int = 0


def _check_finite(value: float, grad: np.ndarray, where: str) -> None:
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise OptimizerError(f"non-finite objective data during {where}: f={value!r}")


def two_loop_direction(history: list[tuple[np.ndarray, np.ndarray]], rhs: np.ndarray) -> np.ndarray:
    """Approximate -A^{-1} rhs from stored (s, y) curvature pairs.

    With empty history this is -rhs (identity initial inverse Hessian);
    otherwise the standard two-loop recursion with gamma = s.y / y.y
    scaling of the seed matrix.
    """
    q = np.array(rhs, dtype=float)
    if not history:
        return -q
    alphas = []
    rhos = [1.0 / float(np.dot(y, s)) for s, y in history]
    for (s, y), rho in zip(reversed(history), reversed(rhos)):
        a = rho * float(np.dot(s, q))
        q -= a * y
        alphas.append(a)
    s_last, y_last = history[-1]
    q *= float(np.dot(s_last, y_last)) / float(np.dot(y_last, y_last))
    for (s, y), rho, a in zip(history, rhos, reversed(alphas)):
        b = rho * float(np.dot(y, q))
        q += s * (a - b)
    return -q


def lbfgs_newton_direction(history, rhs) -> np.ndarray:
    return two_loop_direction(list(history), np.asarray(rhs, dtype=float))


def _zoom(fg, x, d, f0, dphi0, a_lo, a_hi, f_lo, g_lo, c1, c2, max_iter=25):
    calls = 0
    for _ in range(max_iter):
        if abs(a_hi - a_lo) <= 1e-12 * max(1.0, abs(a_lo)):
            break
        a = 0.5 * (a_lo + a_hi)
        f_a, g_a = fg(x + a * d)
        calls += 1
        dphi_a = float(np.dot(g_a, d))
        if f_a > f0 + c1 * a * dphi0 or f_a >= f_lo:
            a_hi = a
        else:
            if abs(dphi_a) <= -c2 * dphi0:
                return a, f_a, g_a, calls
            if dphi_a * (a_hi - a_lo) >= 0:
                a_hi = a_lo
            a_lo, f_lo, g_lo = a, f_a, g_a
    if a_lo <= 0.0 or g_lo is None:
        return None
    # Armijo point without the curvature condition: still a monotone step;
    # the curvature-pair skip rule guards the history
    return a_lo, f_lo, g_lo, calls


def _wolfe_search(fg, x, d, f0, g0, c1, c2, max_expand=20):
    """Strong-Wolfe step along d; returns (alpha, f, g, calls) or None."""
    dphi0 = float(np.dot(g0, d))
    if dphi0 >= 0 or -dphi0 <= 1e-17 * max(1.0, abs(f0)):
        return None
    a_prev, f_prev, g_prev = 0.0, f0, g0
    a = 1.0
    calls = 0
    for i in range(max_expand):
        f_a, g_a = fg(x + a * d)
        calls += 1
        dphi_a = float(np.dot(g_a, d))
        if f_a > f0 + c1 * a * dphi0 or (i > 0 and f_a >= f_prev):
            res = _zoom(fg, x, d, f0, dphi0, a_prev, a, f_prev, g_prev, c1, c2)
            if res is None:
                return None
            return res[0], res[1], res[2], calls + res[3]
        if abs(dphi_a) <= -c2 * dphi0:
            return a, f_a, g_a, calls
        if dphi_a >= 0:
            res = _zoom(fg, x, d, f0, dphi0, a, a_prev, f_a, g_a, c1, c2)
            if res is None:
                return None
            return res[0], res[1], res[2], calls + res[3]
        a_prev, f_prev, g_prev = a, f_a, g_a
        a *= 2.0
    return None


def lbfgs_minimize(objective, x0, cfg: LbfgsConfig | None = None,
                   callback=None) -> OptimizerResult:
    """Minimize objective(x) -> (value, gradient) by L-BFGS.

    Terminates when the gradient infinity-norm drops to cfg.grad_tol or
    the iteration budget is exhausted.  Accepted steps are monotone by the
    Wolfe conditions; a stalled line search at numerical precision reports
    convergence with the exit gradient norm.  `callback(x, f, gnorm)` fires
    after every accepted step.
    """
    cfg = cfg or LbfgsConfig()
    x = np.array(x0, dtype=float)
    calls = 0

    def fg(z):
        nonlocal calls
        calls += 1
        v, g = objective(z)
        g = np.asarray(g, dtype=float)
        _check_finite(v, g, "L-BFGS")
        return float(v), g

    f, g = fg(x)
    history: list[tuple[np.ndarray, np.ndarray]] = []
    it = 0
    reason = "max_iter"
    while it < cfg.max_iter:
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm <= cfg.grad_tol:
            reason = "converged"
            break
        d = two_loop_direction(history, g)
        if float(np.dot(d, g)) >= 0.0:
            history.clear()
            d = -g
        hit = _wolfe_search(fg, x, d, f, g, cfg.wolfe_c1, cfg.wolfe_c2)
        if hit is None:
            reason = "converged"  # directional derivative at rounding floor
            break
        alpha, f_new, g_new, _ = hit
        s = alpha * d
        y = g_new - g
        sy = float(np.dot(s, y))
        if sy > _PAIR_SKIP * float(np.linalg.norm(s) * np.linalg.norm(y)):
            history.append((s, y))
            if len(history) > cfg.history_size:
                history.pop(0)
        x = x + s
        f, g = f_new, g_new
        it += 1
        if callback is not None:
            callback(x.copy(), f, float(np.max(np.abs(g))))
    else:
        reason = "max_iter"
    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    if gnorm <= cfg.grad_tol:
        reason = "converged"
    f_final, g_final = fg(x)
    return OptimizerResult(x, f_final, it, float(np.max(np.abs(g_final))), reason, calls)


def nsgd_minimize(objective, x0, cfg: NsgdConfig) -> OptimizerResult:
    """Noisy SGD: x <- x - eta * (grad + N(0, sigma_t^2)), sigma_t^2 = eta/(1+t)^gamma.

    Deterministic for a fixed seed; returns the best-seen iterate because
    the injected noise makes the final iterate worse in expectation.
    """
    rng = np.random.default_rng(cfg.seed)
    x = np.array(x0, dtype=float)
    calls = 0
    best_x, best_f = x.copy(), np.inf
    for t in range(cfg.epochs):
        v, g = objective(x)
        g = np.asarray(g, dtype=float)
        calls += 1
        _check_finite(v, g, "N-SGD")
        if v < best_f:
            best_f, best_x = float(v), x.copy()
        sigma = (cfg.learning_rate / (1.0 + t) ** cfg.gamma) ** 0.5
        noise = cfg.noise_scale * sigma * rng.standard_normal(x.shape)
        x = x - cfg.learning_rate * (g + noise)
    v, g = objective(x)
    calls += 1
    _check_finite(v, np.asarray(g, dtype=float), "N-SGD")
    if v < best_f:
        best_f, best_x = float(v), x.copy()
    f_final, g_final = objective(best_x)
    calls += 1
    return OptimizerResult(
        best_x, float(f_final), cfg.epochs, float(np.max(np.abs(np.asarray(g_final)))),
        "max_iter", calls,
    )


OptimizerConfig = LbfgsConfig | NsgdConfig


def vqe(functional, t: float, theta0, optimizer: OptimizerConfig) -> OptimizerResult:
    """Minimize theta -> E(theta, t) with the configured optimizer."""

    def objective(theta):
        return functional.energy(theta, t), functional.gradient(theta, t)

    if isinstance(optimizer, LbfgsConfig):
        return lbfgs_minimize(objective, theta0, optimizer)
    if isinstance(optimizer, NsgdConfig):
        return nsgd_minimize(objective, theta0, optimizer)
    raise TypeError(f"unknown optimizer config {optimizer!r}")
