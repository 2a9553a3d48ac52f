import numpy as np
import pytest

from adiapath.ansatz import build_hea
from adiapath.chemistry import transverse_hamiltonian
from adiapath.derivatives import EnergyFunctional
from adiapath.errors import OptimizerError
from adiapath.optimizers import (
    LbfgsConfig,
    NsgdConfig,
    lbfgs_minimize,
    lbfgs_newton_direction,
    nsgd_minimize,
    vqe,
)
from adiapath.paulis import Observable
from adiapath.schedules import make_schedule

from test_derivatives import one_qubit_functional


def quadratic(d):
    dmat = np.asarray(d, dtype=float)

    def f(x):
        return 0.5 * float(x @ (dmat * x)), dmat * x

    return f


def rosenbrock(x):
    a, b = 1.0, 100.0
    val = (a - x[0]) ** 2 + b * (x[1] - x[0] ** 2) ** 2
    grad = np.array(
        [
            -2 * (a - x[0]) - 4 * b * x[0] * (x[1] - x[0] ** 2),
            2 * b * (x[1] - x[0] ** 2),
        ]
    )
    return val, grad


class TestLbfgs:
    def test_quadratic_fast_convergence(self):
        res = lbfgs_minimize(quadratic([1.0, 10.0]), np.array([1.0, 1.0]))
        assert res.exit_reason == "converged"
        assert res.iterations <= 20
        assert np.max(np.abs(res.theta)) <= 1e-7
        assert res.grad_norm <= 1e-8

    def test_rosenbrock(self):
        res = lbfgs_minimize(rosenbrock, np.array([-1.2, 1.0]))
        assert np.linalg.norm(res.theta - np.array([1.0, 1.0])) <= 1e-6

    def test_stationary_start(self):
        res = lbfgs_minimize(quadratic([1.0, 1.0]), np.zeros(2))
        assert res.iterations == 0
        assert res.exit_reason == "converged"
        assert np.array_equal(res.theta, np.zeros(2))

    def test_monotone_accepted_steps(self):
        seen = []
        lbfgs_minimize(rosenbrock, np.array([-1.2, 1.0]), callback=lambda x, f, g: seen.append(f))
        assert all(b <= a + 1e-12 for a, b in zip(seen, seen[1:]))

    def test_nonfinite_aborts(self):
        def bad(x):
            return float("nan"), np.zeros_like(x)

        with pytest.raises(OptimizerError):
            lbfgs_minimize(bad, np.ones(2))

    def test_energy_reevaluated_at_return(self):
        res = lbfgs_minimize(quadratic([2.0, 3.0]), np.array([0.3, -0.4]))
        v, _ = quadratic([2.0, 3.0])(res.theta)
        assert res.energy == v


class TestNewtonDirection:
    def test_empty_history_identity(self):
        d = lbfgs_newton_direction([], np.array([1.0, 0.0]))
        assert np.array_equal(d, np.array([-1.0, 0.0]))

    def test_zero_rhs(self):
        hist = [(np.array([1.0, 0.0]), np.array([2.0, 0.0]))]
        assert np.array_equal(lbfgs_newton_direction(hist, np.zeros(2)), np.zeros(2))

    def test_two_exact_steps_reconstruct_inverse(self):
        a = np.array([[2.0, 0.3], [0.3, 5.0]])
        x = np.array([1.0, 1.0])
        history = []
        for _ in range(2):
            g = a @ x
            d = lbfgs_newton_direction(history, g)
            alpha = -float(g @ d) / float(d @ a @ d)
            s = alpha * d
            history.append((s, a @ s))
            x = x + s
        rhs = np.array([0.7, -1.3])
        want = -np.linalg.solve(a, rhs)
        got = lbfgs_newton_direction(history, rhs)
        assert np.max(np.abs(got - want)) <= 1e-8


class TestNsgd:
    def test_zero_noise_is_plain_gd(self):
        cfg = NsgdConfig(epochs=50, learning_rate=0.1, seed=3, noise_scale=0.0)
        f = quadratic([1.0, 2.0])
        res = nsgd_minimize(f, np.array([1.0, -1.0]), cfg)
        x = np.array([1.0, -1.0])
        traj_best = np.inf
        for _ in range(50):
            v, g = f(x)
            traj_best = min(traj_best, v)
            x = x - 0.1 * g
        v, _ = f(x)
        traj_best = min(traj_best, v)
        assert res.energy == pytest.approx(traj_best, abs=1e-15)

    def test_deterministic_given_seed(self):
        cfg = NsgdConfig(epochs=30, seed=42)
        f = quadratic([1.0, 3.0])
        r1 = nsgd_minimize(f, np.array([0.5, 0.5]), cfg)
        r2 = nsgd_minimize(f, np.array([0.5, 0.5]), cfg)
        assert np.array_equal(r1.theta, r2.theta)
        assert r1.energy == r2.energy

    def test_stationary_with_noise_disabled(self):
        cfg = NsgdConfig(epochs=20, noise_scale=0.0, seed=1)
        res = nsgd_minimize(quadratic([1.0, 1.0]), np.zeros(2), cfg)
        assert np.array_equal(res.theta, np.zeros(2))

    def test_one_qubit_vqe(self):
        # eta = 0.01 contracts too slowly to pass 1e-2 from theta0 = 1.0 in
        # 100 epochs (lands at θ≈0.40, error 0.079); 0.05 converges with margin
        f = one_qubit_functional()
        cfg = NsgdConfig(epochs=100, learning_rate=0.05, seed=7)

        def objective(theta):
            return f.energy(theta, 0.0), f.gradient(theta, 0.0)

        res = nsgd_minimize(objective, np.array([1.0]), cfg)
        assert abs(res.energy - (-1.0)) <= 1e-2


class TestVqe:
    def test_transverse_ground_with_hea(self, rng):
        n = 3
        h = transverse_hamiltonian(n)
        f = EnergyFunctional(build_hea(n, 1), h, h, make_schedule("linear"))
        theta0 = rng.uniform(-np.pi, np.pi, size=f.n_params)
        res = vqe(f, 1.0, theta0, LbfgsConfig())
        assert res.energy == pytest.approx(-float(n), abs=1e-6)

    def test_stationary_nsgd_no_noise(self):
        f = one_qubit_functional()
        res = vqe(f, 0.0, np.array([0.0]), NsgdConfig(epochs=10, noise_scale=0.0, seed=5))
        assert np.array_equal(res.theta, np.zeros(1))

    def test_vqe_optimum_gradient_small(self):
        f = one_qubit_functional()
        res = vqe(f, 1.0, np.array([0.3]), LbfgsConfig())
        assert res.grad_norm <= 1e-8
        assert abs(f.gradient(res.theta, 1.0)[0]) <= 1e-8
