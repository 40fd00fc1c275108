import numpy as np
import pytest

from pvqa.errors import ProblemError, TooManyQubitsError
from pvqa.operators import (
    BoundaryCondition, PoissonProblem, cyclic_shift_matrix, laplacian_matrix, laplacian_pauli,
    make_source, shift_circuit, shift_pauli,
)
from pvqa.pauli import decompose_matrix, is_hermitian, to_matrix
from pvqa.simulator import circuit_unitary

BCS = list(BoundaryCondition)


def _problem(n, bc, h=1.0):
    kind = "alternating" if bc is BoundaryCondition.PERIODIC else "ones"
    return PoissonProblem(n, bc, make_source(kind, n), h)


def _clean_block(u, n, width):
    """Rows and columns of ``u`` whose extra (ancilla) qubits are all zero."""
    idx = np.arange(2**n)
    assert width >= n
    return u[np.ix_(idx, idx)]


def test_shift_circuit_small():
    assert [g.name for g in shift_circuit(1).gates] == ["X"]
    gates = shift_circuit(2).gates
    assert [(g.name, g.qubits) for g in gates] == [("CX", (0, 1)), ("X", (0,))]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_shift_variants_agree(n):
    perm = cyclic_shift_matrix(n)
    assert np.allclose(circuit_unitary(shift_circuit(n)), perm, atol=1e-9)
    assert np.allclose(to_matrix(shift_pauli(n)), perm, atol=1e-10)
    v = shift_circuit(n, "vchain")
    block = _clean_block(circuit_unitary(v), n, v.num_qubits)
    assert np.allclose(block, perm, atol=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_shift_pauli_matches_brute_force(n):
    a, b = shift_pauli(n).as_dict(), decompose_matrix(cyclic_shift_matrix(n)).as_dict()
    assert a.keys() == b.keys()
    assert all(a[k] == pytest.approx(b[k], abs=1e-12) for k in a)


def test_shift_is_unitary():
    for n in range(1, 5):
        s = to_matrix(shift_pauli(n))
        assert np.allclose(s @ s.conj().T, np.eye(2**n))


def test_shift_pauli_known_terms():
    assert shift_pauli(1).terms == ((1, "X"),)
    assert shift_pauli(2) == decompose_matrix(cyclic_shift_matrix(2))


def test_laplacian_examples():
    d1 = to_matrix(laplacian_pauli(_problem(1, BoundaryCondition.DIRICHLET)))
    assert np.allclose(d1, [[2, -1], [-1, 2]])
    p2 = to_matrix(laplacian_pauli(_problem(2, BoundaryCondition.PERIODIC)))
    assert np.allclose(p2[0], [2, -1, 0, -1])
    assert np.allclose(np.linalg.eigvalsh(p2), [0, 2, 2, 4])
    n2 = laplacian_matrix(_problem(2, BoundaryCondition.NEUMANN))
    assert np.allclose(n2, [[1, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 1]])
    assert np.linalg.det(laplacian_matrix(_problem(2, BoundaryCondition.DIRICHLET))) > 0


@pytest.mark.parametrize("bc", BCS)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_pauli_and_dense_laplacian_agree(bc, n):
    prob = _problem(n, bc, h=0.5)
    ps = laplacian_pauli(prob)
    assert is_hermitian(ps)
    assert np.allclose(to_matrix(ps), laplacian_matrix(prob), atol=1e-10)


def test_periodic_null_vector_is_uniform():
    for n in range(1, 6):
        a = laplacian_matrix(_problem(n, BoundaryCondition.PERIODIC))
        vals, vecs = np.linalg.eigh(a)
        assert vals[0] == pytest.approx(0, abs=1e-10)
        assert np.allclose(np.abs(vecs[:, 0]), 2 ** (-n / 2))


def test_definiteness():
    for n in range(1, 6):
        d = np.linalg.eigvalsh(laplacian_matrix(_problem(n, BoundaryCondition.DIRICHLET)))
        nm = np.linalg.eigvalsh(laplacian_matrix(_problem(n, BoundaryCondition.NEUMANN)))
        assert d.min() > 0
        assert nm.min() > -1e-10


# Pauli expansions are unique, so these counts are properties of the matrices
# themselves; they double per qubit rather than growing linearly.
TERM_COUNTS = {
    BoundaryCondition.PERIODIC: [2, 3, 6, 12, 24, 48],
    BoundaryCondition.DIRICHLET: [2, 4, 8, 16, 32, 64],
    BoundaryCondition.NEUMANN: [2, 5, 11, 23, 47, 95],
}


@pytest.mark.parametrize("bc", BCS)
def test_laplacian_term_counts(bc):
    counts = [len(laplacian_pauli(_problem(n, bc))) for n in range(1, 7)]
    assert counts == TERM_COUNTS[bc]
    for n in range(1, 5):
        brute = decompose_matrix(laplacian_matrix(_problem(n, bc)))
        assert len(brute) == counts[n - 1]


def test_problem_validation():
    with pytest.raises(ProblemError):
        PoissonProblem(2, "dirichlet", np.ones(3))
    with pytest.raises(ProblemError):
        PoissonProblem(1, "dirichlet", np.zeros(2))
    with pytest.raises(ProblemError):
        PoissonProblem(2, "periodic", np.ones(4))
    with pytest.raises(ProblemError):
        PoissonProblem(1, "dirichlet", np.ones(2), grid_spacing=0)


def test_width_caps():
    with pytest.raises(TooManyQubitsError):
        shift_pauli(11)
