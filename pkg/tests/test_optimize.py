import numpy as np
import pytest

from pvqa.ansatz import AnsatzSpec
from pvqa.cost import PoissonCost
from pvqa.operators import PoissonProblem
from pvqa.optimize import OptimizerConfig, minimize, minimize_nelder_mead, minimize_powell

METHODS = [minimize_nelder_mead, minimize_powell]


def quadratic_battery(seed=0):
    """Random SPD quadratics, d = 1..6, with known minimizers."""
    rng = np.random.default_rng(seed)
    out = []
    for d in range(1, 7):
        for _ in range(3):
            q = rng.normal(size=(d, d))
            h = q @ q.T + 0.5 * np.eye(d)
            x_star = rng.uniform(-3, 3, size=d)
            out.append((lambda x, h=h, c=x_star: float((x - c) @ h @ (x - c)), x_star))
    return out


@pytest.mark.parametrize("method", METHODS)
def test_one_dimensional_quadratic(method):
    tr = method(lambda x: float((x[0] - 2) ** 2), [0.0], OptimizerConfig())
    assert tr.best_x[0] == pytest.approx(2, abs=1e-6)


@pytest.mark.parametrize("method", METHODS)
def test_two_dimensional_quadratic(method):
    tr = method(lambda x: float((x[0] - 1) ** 2 + 10 * (x[1] + 3) ** 2), [0.0, 0.0], OptimizerConfig())
    assert np.allclose(tr.best_x, [1, -3], atol=1e-5)


@pytest.mark.parametrize("method", METHODS)
def test_n1_poisson_cost(method):
    prob = PoissonProblem(1, "dirichlet", np.ones(2))
    cost = PoissonCost(prob, AnsatzSpec("mps", 1))
    tr = method(cost.reduced, np.random.default_rng(0).uniform(0, 6, 1), OptimizerConfig())
    assert tr.best_f == pytest.approx(-0.5, abs=1e-6)


@pytest.mark.parametrize("method", METHODS)
def test_quadratic_battery(method):
    for f, x_star in quadratic_battery():
        tr = method(f, np.zeros_like(x_star), OptimizerConfig(max_evals=2000))
        assert tr.evals_used <= 2000
        assert np.max(np.abs(tr.best_x - x_star)) < 1e-5


@pytest.mark.parametrize("method", METHODS)
def test_plateau_toy_literal(method):
    # flat at zero around the start, so the start is already optimal
    cfg = OptimizerConfig(initial_simplex_scale=10)
    tr = method(lambda x: max(0.0, abs(x[0]) - 5), [0.1], cfg)
    assert tr.best_f == 0


@pytest.mark.parametrize("method", METHODS)
def test_plateau_escape_with_large_scale(method):
    # flat at 1 out to |x| = 5, valley at |x| = 8
    def f(x):
        return min(1.0, (abs(x[0]) - 8) ** 2 / 9)

    tr = method(f, [0.1], OptimizerConfig(initial_simplex_scale=10))
    assert tr.best_f == pytest.approx(0, abs=1e-10)
    small = method(f, [0.1], OptimizerConfig(initial_simplex_scale=0.1, max_evals=200))
    assert small.best_f == 1.0


@pytest.mark.parametrize("name", ["nelder-mead", "powell"])
def test_restarts_and_determinism(name):
    def f(x):
        return float(np.sum(np.sin(3 * x) + 0.1 * x**2))

    cfg = OptimizerConfig(method=name, restarts=3, seed=5, max_evals=300)
    a = minimize(f, [1.0, 1.0], cfg)
    b = minimize(f, [1.0, 1.0], cfg)
    assert a.history == b.history and np.array_equal(a.best_x, b.best_x)
    assert len(a.restart_bests) == 4
    assert a.best_f == min(a.restart_bests)
    assert a.restart_bests[a.best_restart] == a.best_f
    assert a.evals_used <= cfg.max_evals * (cfg.restarts + 1)
    assert a.evals_used == len(a.history)
    run = a.running_min()
    assert np.all(np.diff(run) <= 0)


def test_budget_exhaustion_reports_not_converged():
    tr = minimize_nelder_mead(lambda x: float(np.sum(x**2)), np.ones(4), OptimizerConfig(max_evals=10))
    assert not tr.converged and tr.evals_used == 10


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(method="bfgs")
    with pytest.raises(ValueError):
        OptimizerConfig(max_evals=0)
    with pytest.raises(ValueError):
        OptimizerConfig(x_tolerance=0)
