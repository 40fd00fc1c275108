import numpy as np
import pytest

from pvqa.errors import SingularSystemError
from pvqa.operators import PoissonProblem, laplacian_matrix, make_source
from pvqa.oracle import compare_solutions, solve_classical


def test_dirichlet_n1():
    f = np.ones(2) / np.sqrt(2)
    sol = solve_classical(PoissonProblem(1, "dirichlet", f))
    assert np.allclose(sol.u, f) and sol.gauge == "none"
    assert sol.residual_norm < 1e-8


def test_periodic_uniform_source_is_singular():
    # built by bypassing the problem's own check, as a caller with stale data might
    prob = PoissonProblem(2, "periodic", make_source("alternating", 2))
    object.__setattr__(prob, "source", np.ones(4))
    with pytest.raises(SingularSystemError):
        solve_classical(prob)


def test_periodic_alternating():
    f = np.array([1, -1, 1, -1]) / 2
    sol = solve_classical(PoissonProblem(2, "periodic", f))
    assert np.allclose(sol.u, f / 4)
    assert sol.gauge == "mean-zero" and abs(sol.u.mean()) < 1e-12


def test_neumann_projects_source(caplog):
    prob = PoissonProblem(3, "neumann", np.arange(8.0))
    sol = solve_classical(prob)
    a = laplacian_matrix(prob)
    assert np.linalg.norm(a @ sol.u - (prob.source - prob.source.mean())) < 1e-8
    assert "projecting" in caplog.text


@pytest.mark.parametrize("bc", ["dirichlet", "neumann", "periodic"])
def test_residuals_small(bc):
    rng = np.random.default_rng(0)
    for n in range(1, 7):
        f = rng.normal(size=2**n)
        if bc == "periodic":
            f -= f.mean()
        sol = solve_classical(PoissonProblem(n, bc, f, 0.3))
        assert sol.residual_norm < 1e-8


def test_grid_refinement_second_order():
    # -u'' = sin(2 pi x) on [0, 1) has u = sin(2 pi x) / (2 pi)^2
    errors = []
    for n in (3, 4, 5):
        size = 2**n
        x = np.arange(size) / size
        prob = PoissonProblem(n, "periodic", np.sin(2 * np.pi * x), grid_spacing=1 / size)
        u = solve_classical(prob).u
        errors.append(np.max(np.abs(u - np.sin(2 * np.pi * x) / (2 * np.pi) ** 2)))
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(rates > 1.9)


def test_compare_solutions():
    u = np.array([1.0, 2.0, -1.0])
    assert compare_solutions(u, u) == {"overlap": 1.0, "l2_relative_error": 0.0}
    assert compare_solutions([1, 0], [0, 1])["overlap"] == 0
    m = compare_solutions(u, 1.1 * u)
    assert m["overlap"] == pytest.approx(1.0) and m["l2_relative_error"] == pytest.approx(0.1)
    with pytest.raises(ValueError):
        compare_solutions(u, np.zeros(3))
