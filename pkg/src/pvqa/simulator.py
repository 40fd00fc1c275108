"""Exact statevector and density-matrix simulation of logical circuits."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Gate, LogicalCircuit
from .errors import CircuitError, DimensionError, NonHermitianError, TooManyQubitsError
from .pauli import PauliSum, is_hermitian

NORM_TOL = 1e-10
MAX_DENSITY_QUBITS = 12

_SQ2 = 1 / np.sqrt(2)
_FIXED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.eye(4, dtype=complex)[[0, 2, 1, 3]],
}


@lru_cache(maxsize=None)
def _controlled_x(num_controls: int) -> np.ndarray:
    dim = 2 ** (num_controls + 1)
    perm = np.arange(dim)
    perm[[dim - 2, dim - 1]] = perm[[dim - 1, dim - 2]]
    return np.eye(dim, dtype=complex)[perm]


def gate_matrix(gate: Gate) -> np.ndarray:
    """Unitary of ``gate`` in its local basis, first listed qubit most significant."""
    if gate.param is not None:
        raise CircuitError(f"unbound parameter {gate.param!r}")
    name = gate.name
    if name in _FIXED:
        return _FIXED[name]
    if name in ("CX", "CCX", "MCX"):
        return _controlled_x(gate.num_controls)
    if name in ("RX", "RY", "RZ"):
        c, s = np.cos(gate.angle / 2), np.sin(gate.angle / 2)
        if name == "RX":
            return np.array([[c, -1j * s], [-1j * s, c]])
        if name == "RY":
            return np.array([[c, -s], [s, c]], dtype=complex)
        return np.diag([np.exp(-0.5j * gate.angle), np.exp(0.5j * gate.angle)])
    raise CircuitError(f"{name} has no unitary")


def _apply(tensor: np.ndarray, mat: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    moved = np.moveaxis(tensor, axes, range(k))
    shape = moved.shape
    out = (mat @ moved.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(out, range(k), axes)


@dataclass(frozen=True, eq=False)
class Statevector:
    """Normalized pure state; ``amplitudes[k]`` is the weight of basis state ``k``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        dim = amps.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise DimensionError(f"statevector length {dim} is not a power of two")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"statevector norm {norm} differs from 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @classmethod
    def zero(cls, num_qubits: int) -> "Statevector":
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[0] = 1
        return cls(amps)

    @classmethod
    def from_vector(cls, vec) -> "Statevector":
        vec = np.asarray(vec, dtype=complex)
        return cls(vec / np.linalg.norm(vec))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __eq__(self, other):
        return isinstance(other, Statevector) and np.array_equal(self.amplitudes, other.amplitudes)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError("density matrix must be square")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def num_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    @classmethod
    def from_statevector(cls, state: Statevector) -> "DensityMatrix":
        a = state.amplitudes
        return cls(np.outer(a, a.conj()))


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing probabilities chosen by gate arity (3+ qubits use ``eps_3q``)."""

    eps_1q: float = 0.0
    eps_2q: float = 0.0
    eps_3q: float = 0.0

    def __post_init__(self):
        for name in ("eps_1q", "eps_2q", "eps_3q"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")

    def error_rate(self, gate: Gate) -> float:
        k = len(gate.qubits)
        return self.eps_1q if k == 1 else self.eps_2q if k == 2 else self.eps_3q


def _check_bound(circuit: LogicalCircuit) -> None:
    if not circuit.is_bound:
        raise CircuitError(f"circuit has unbound parameters {circuit.parameters}")


def run_statevector(circuit: LogicalCircuit, initial: Statevector | None = None) -> Statevector:
    _check_bound(circuit)
    n = circuit.num_qubits
    if initial is None:
        initial = Statevector.zero(n)
    if initial.num_qubits != n:
        raise DimensionError("initial state width differs from circuit")
    psi = np.array(initial.amplitudes).reshape((2,) * n)
    for g in circuit.gates:
        if g.name == "Measure":
            continue
        psi = _apply(psi, gate_matrix(g), [n - 1 - q for q in g.qubits])
    vec = psi.reshape(-1)
    # renormalize away rounding drift so long circuits stay within NORM_TOL
    return Statevector(vec / np.linalg.norm(vec))


def circuit_unitary(circuit: LogicalCircuit) -> np.ndarray:
    """Dense unitary obtained by simulating every basis state."""
    _check_bound(circuit)
    n = circuit.num_qubits
    dim = 2**n
    cols = np.eye(dim, dtype=complex).reshape((dim,) + (2,) * n)
    # batch axis first; qubit q lives on axis n - q
    for g in circuit.gates:
        if g.name == "Measure":
            continue
        cols = _apply(cols, gate_matrix(g), [n - q for q in g.qubits])
    return cols.reshape(dim, dim).T


def expectation(state: Statevector, observable: PauliSum) -> float:
    if state.num_qubits != observable.num_qubits:
        raise DimensionError("state and observable widths differ")
    if not is_hermitian(observable):
        raise NonHermitianError("expectation needs a Hermitian observable")
    psi = state.amplitudes
    value = np.vdot(psi, observable.apply(psi))
    assert abs(value.imag) < NORM_TOL * max(1.0, abs(value.real)) + 1e-10
    return float(value.real)


def sample_counts(state: Statevector, shots: int, seed: int | np.random.Generator) -> dict[str, int]:
    """Multinomial sample of computational-basis outcomes, keyed by bitstring.

    Bitstrings print qubit ``n-1`` first, so ``"01"`` means qubit 0 is set.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    draws = rng.multinomial(shots, probs)
    n = state.num_qubits
    return {format(k, f"0{n}b"): int(c) for k, c in enumerate(draws) if c}


def _depolarize(rho: np.ndarray, row_axes: list[int], col_axes: list[int], p: float) -> np.ndarray:
    k = len(row_axes)
    d = 2**k
    lead = row_axes + col_axes
    moved = np.moveaxis(rho, lead, range(2 * k))
    shape = moved.shape
    flat = moved.reshape(d, d, -1)
    reduced = np.einsum("iir->r", flat)
    mixed = np.eye(d)[:, :, None] * reduced[None, None, :] / d
    out = ((1 - p) * flat + p * mixed).reshape(shape)
    return np.moveaxis(out, range(2 * k), lead)


def run_density_with_noise(circuit: LogicalCircuit, noise: NoiseModel | None = None) -> DensityMatrix:
    """Evolve ``|0..0><0..0|`` gate by gate, depolarizing each gate's qubits after it."""
    _check_bound(circuit)
    n = circuit.num_qubits
    if n > MAX_DENSITY_QUBITS:
        raise TooManyQubitsError(f"density simulation capped at {MAX_DENSITY_QUBITS} qubits")
    noise = noise or NoiseModel()
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1
    rho = rho.reshape((2,) * (2 * n))
    for g in circuit.gates:
        if g.name == "Measure":
            continue
        rows = [n - 1 - q for q in g.qubits]
        cols = [2 * n - 1 - q for q in g.qubits]
        u = gate_matrix(g)
        rho = _apply(rho, u, rows)
        rho = _apply(rho, u.conj(), cols)
        p = noise.error_rate(g)
        if p:
            rho = _depolarize(rho, rows, cols, p)
    return DensityMatrix(rho.reshape(2**n, 2**n))


def state_fidelity(ideal: Statevector, noisy: DensityMatrix) -> float:
    if ideal.num_qubits != noisy.num_qubits:
        raise DimensionError("state widths differ")
    psi = ideal.amplitudes
    f = float(np.real(np.vdot(psi, noisy.matrix @ psi)))
    return min(max(f, 0.0), 1.0)
