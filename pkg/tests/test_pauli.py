import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvqa.errors import DimensionError, NonHermitianError, TooManyQubitsError
from pvqa.operators import BoundaryCondition, PoissonProblem, cyclic_shift_matrix, laplacian_pauli
from pvqa.pauli import (
    PauliSum, decompose_matrix, is_hermitian, measurement_bases, multiply_labels, pauli_matrix,
    to_matrix, z_expectation_from_counts,
)
from pvqa.simulator import Statevector, expectation, run_statevector, sample_counts

labels = st.text(alphabet="IXYZ", min_size=3, max_size=3)


def test_single_paulis():
    assert decompose_matrix(pauli_matrix("X")).terms == ((1, "X"),)
    for n in (1, 2, 3):
        assert decompose_matrix(np.eye(2**n)).terms == ((1, "I" * n),)
    assert np.allclose(to_matrix(PauliSum(1, ((1, "Z"),))), np.diag([1, -1]))
    proj = PauliSum(1, ((0.5, "I"), (0.5, "Z")))
    assert np.allclose(to_matrix(proj), np.diag([1, 0]))


def test_label_order_puts_qubit_zero_first():
    # "XI" is X on qubit 0, which flips the least significant bit
    m = to_matrix(PauliSum(2, ((1, "XI"),)))
    assert m[1, 0] == 1 and m[2, 0] == 0


def test_cyclic_shift_two_qubits():
    ps = decompose_matrix(cyclic_shift_matrix(2))
    assert ps.as_dict() == pytest.approx({"XI": 0.5, "XX": 0.5, "YI": -0.5j, "YX": 0.5j})
    assert not is_hermitian(ps)


def test_decompose_rejects_bad_shape():
    with pytest.raises(DimensionError):
        decompose_matrix(np.eye(3))


def test_round_trip_random_matrices():
    rng = np.random.default_rng(0)
    for n in range(1, 5):
        m = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
        assert np.allclose(to_matrix(decompose_matrix(m)), m, atol=1e-10, rtol=0)


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(labels, st.complex_numbers(max_magnitude=5, allow_nan=False,
                                                   allow_infinity=False), max_size=6))
def test_decompose_inverts_to_matrix(mapping):
    ps = PauliSum.from_dict(3, mapping)
    back = decompose_matrix(to_matrix(ps))
    assert back.num_qubits == 3
    keys = set(ps.as_dict()) | set(back.as_dict())
    for k in keys:
        assert back.as_dict().get(k, 0) == pytest.approx(ps.as_dict().get(k, 0), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(labels, labels)
def test_label_product_matches_matrices(a, b):
    phase, c = multiply_labels(a, b)
    assert np.allclose(phase * pauli_matrix(c), pauli_matrix(a) @ pauli_matrix(b))


def test_sum_product_matches_matrices():
    rng = np.random.default_rng(3)
    for _ in range(10):
        def rand():
            return PauliSum.from_dict(3, {"".join(rng.choice(list("IXYZ"), 3)): complex(*rng.normal(size=2))
                                          for _ in range(5)})
        a, b = rand(), rand()
        assert np.allclose(to_matrix(a @ b), to_matrix(a) @ to_matrix(b), atol=1e-12)


def test_hermitian_decomposition_is_hermitian():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    assert is_hermitian(decompose_matrix(m + m.conj().T))
    assert is_hermitian(PauliSum(1, ((1, "X"),)))
    assert not is_hermitian(PauliSum(1, ((1j, "Y"),)))


def test_canonical_form():
    ps = PauliSum(2, ((1, "ZZ"), (2, "XI"), (-1, "ZZ"), (1e-14, "YY")))
    assert ps.terms == ((2, "XI"),)


def test_text_round_trip():
    ps = PauliSum(2, ((0.5, "XI"), (-0.25j, "YZ")))
    assert PauliSum.loads(ps.dumps()) == ps


def test_to_matrix_cap():
    with pytest.raises(TooManyQubitsError):
        to_matrix(PauliSum(11, ((1, "Z" * 11),)))


def test_measurement_bases_examples():
    bases, offset = measurement_bases(PauliSum(1, ((0.5, "X"),)))
    assert offset == 0 and len(bases) == 1
    b = bases[0]
    assert [g.name for g in b.rotation.gates] == ["H"] and b.z_label == "Z" and b.weight == 0.5
    bases, offset = measurement_bases(PauliSum(1, ((1, "I"),)))
    assert bases == [] and offset == 1
    with pytest.raises(NonHermitianError):
        measurement_bases(PauliSum(1, ((1j, "Y"),)))


def test_y_basis_rotation_diagonalizes_y():
    (b,), _ = measurement_bases(PauliSum(1, ((1, "Y"),)))
    for psi in (np.array([1, 1j]) / np.sqrt(2), np.array([1, -1j]) / np.sqrt(2)):
        s = Statevector.from_vector(psi)
        direct = expectation(s, PauliSum(1, ((1, "Y"),)))
        rotated = run_statevector(b.rotation, initial=s)
        assert expectation(rotated, PauliSum(1, ((1, "Z"),))) == pytest.approx(direct)


def test_shot_estimate_of_periodic_laplacian():
    a = laplacian_pauli(PoissonProblem(2, BoundaryCondition.PERIODIC, [1, -1, 1, -1]))
    psi = Statevector.zero(2)
    bases, total = measurement_bases(a)
    rng = np.random.default_rng(11)
    var = 0.0
    for b in bases:
        mean, se = z_expectation_from_counts(
            sample_counts(run_statevector(b.rotation, initial=psi), 10_000, rng), b.z_mask)
        total += b.weight * mean
        var += (b.weight * se) ** 2
    assert abs(total - expectation(psi, a)) <= 3 * np.sqrt(var) + 1e-12
