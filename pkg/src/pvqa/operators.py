"""Shift operators and finite-difference Laplacians on ``2^n`` grid points."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .circuit import Gate, LogicalCircuit, mcx_vchain
from .errors import ProblemError, TooManyQubitsError
from .pauli import MAX_DENSE_QUBITS, PauliSum

MEAN_TOL = 1e-10


class BoundaryCondition(str, enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True, eq=False)
class PoissonProblem:
    """Discrete problem ``A u = f`` with ``A`` the negative second difference.

    ``A`` is positive semidefinite, which is the sign the variational cost
    needs. Periodic sources must have zero mean to be solvable.
    """

    num_qubits: int
    boundary: BoundaryCondition
    source: np.ndarray
    grid_spacing: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "boundary", BoundaryCondition(self.boundary))
        f = np.asarray(self.source, dtype=float).reshape(-1)
        if f.shape[0] != 2**self.num_qubits:
            raise ProblemError(f"source has {f.shape[0]} entries, need {2**self.num_qubits}")
        if np.linalg.norm(f) == 0:
            raise ProblemError("source vector is zero")
        if self.boundary is BoundaryCondition.PERIODIC and abs(f.mean()) > MEAN_TOL:
            raise ProblemError("periodic problems need a mean-zero source")
        if self.grid_spacing <= 0:
            raise ProblemError("grid spacing must be positive")
        f.flags.writeable = False
        object.__setattr__(self, "source", f)

    @property
    def size(self) -> int:
        return 2**self.num_qubits

    @property
    def source_norm(self) -> float:
        return float(np.linalg.norm(self.source))

    @property
    def normalized_source(self) -> np.ndarray:
        return self.source / self.source_norm


def make_source(kind: str, num_qubits: int) -> np.ndarray:
    """Named source vectors: ``ones``, ``alternating`` and ``sine``."""
    n = 2**num_qubits
    k = np.arange(n)
    if kind == "ones":
        return np.ones(n)
    if kind == "alternating":
        return np.where(k % 2 == 0, 1.0, -1.0)
    if kind == "sine":
        return np.sin(2 * np.pi * k / n)
    raise ProblemError(f"unknown source kind {kind!r}")


# -- shift as a circuit --------------------------------------------------------
def shift_circuit(num_qubits: int, ancilla_mode: str = "none") -> LogicalCircuit:
    """Cyclic increment ``|k> -> |k+1 mod 2^n>``.

    Bit ``j`` flips when all lower bits are set, so the circuit runs from the
    top bit down: an X on qubit ``j`` controlled by qubits ``0..j-1``, ending
    with a bare X on qubit 0. In ``vchain`` mode the multi-controlled gates
    with three or more controls are expanded onto ``n - 2`` ancillas placed
    after the data qubits.
    """
    if num_qubits < 1:
        raise ValueError("need at least one qubit")
    if ancilla_mode not in ("none", "vchain"):
        raise ValueError(f"unknown ancilla mode {ancilla_mode!r}")
    n = num_qubits
    width = n + max(n - 2, 0) if ancilla_mode == "vchain" else n
    ancillas = list(range(n, width))
    gates: list[Gate] = []
    for j in range(n - 1, 0, -1):
        controls = list(range(j))
        if j == 1:
            gates.append(Gate("CX", (0, 1)))
        elif j == 2:
            gates.append(Gate("CCX", (0, 1, 2)))
        elif ancilla_mode == "vchain":
            gates.extend(mcx_vchain(controls, j, ancillas).gates)
        else:
            gates.append(Gate("MCX", (*controls, j)))
    gates.append(Gate("X", (0,)))
    return LogicalCircuit(width, tuple(gates))


# -- shift as a Pauli sum --------------------------------------------------------
def _local(n: int, ops: dict[int, PauliSum]) -> PauliSum:
    """Tensor single-qubit sums at the given positions, identity elsewhere."""
    out = ops.get(0, PauliSum.identity(1))
    for q in range(1, n):
        out = ops.get(q, PauliSum.identity(1)).tensor(out)
    return out


_P0 = PauliSum.from_dict(1, {"I": 0.5, "Z": 0.5})
_P1 = PauliSum.from_dict(1, {"I": 0.5, "Z": -0.5})
_RAISE = PauliSum.from_dict(1, {"X": 0.5, "Y": -0.5j})  # |1><0|
_LOWER = PauliSum.from_dict(1, {"X": 0.5, "Y": 0.5j})  # |0><1|
_X = PauliSum.from_dict(1, {"X": 1.0})


def _check_pauli_width(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise TooManyQubitsError(f"Pauli operators capped at {MAX_DENSE_QUBITS} qubits")


def shift_pauli(num_qubits: int) -> PauliSum:
    """Pauli expansion of the cyclic increment.

    Multiplies out the same controlled-X layers as :func:`shift_circuit`;
    each layer is ``I - P1^(j) (x) (I - X_j)`` with ``P1 = (I - Z)/2``.
    """
    n = num_qubits
    _check_pauli_width(n)
    ident = PauliSum.identity(n)
    op = _local(n, {0: _X})
    for j in range(1, n):
        proj = _local(n, {q: _P1 for q in range(j)})
        flip = ident - _local(n, {j: _X})
        op = op @ (ident - proj @ flip)
    return op


def _outer(n: int, bra_ket: list[PauliSum]) -> PauliSum:
    return _local(n, dict(enumerate(bra_ket)))


def laplacian_pauli(problem: PoissonProblem) -> PauliSum:
    """Negative second difference ``A / h^2`` as a Hermitian Pauli sum."""
    n = problem.num_qubits
    _check_pauli_width(n)
    s = shift_pauli(n)
    a = PauliSum.identity(n, 2.0) - s - s.dagger()
    if problem.boundary is not BoundaryCondition.PERIODIC:
        # cancel the wraparound couplings |0><N-1| and |N-1><0|
        a = a + _outer(n, [_LOWER] * n) + _outer(n, [_RAISE] * n)
    if problem.boundary is BoundaryCondition.NEUMANN:
        a = a - _outer(n, [_P0] * n) - _outer(n, [_P1] * n)
    return a * (1.0 / problem.grid_spacing**2)


def laplacian_matrix(problem: PoissonProblem) -> np.ndarray:
    n = problem.num_qubits
    if n > 12:
        raise TooManyQubitsError("dense Laplacian capped at 12 qubits")
    size = 2**n
    a = 2.0 * np.eye(size)
    if size > 1:
        idx = np.arange(size - 1)
        a[idx, idx + 1] -= 1
        a[idx + 1, idx] -= 1
    if problem.boundary is BoundaryCondition.PERIODIC:
        a[0, size - 1] -= 1
        a[size - 1, 0] -= 1
    elif problem.boundary is BoundaryCondition.NEUMANN:
        a[0, 0] = a[-1, -1] = 1.0
    return a / problem.grid_spacing**2


def cyclic_shift_matrix(num_qubits: int) -> np.ndarray:
    size = 2**num_qubits
    return np.roll(np.eye(size), 1, axis=0)


__all__ = [
    "BoundaryCondition",
    "PoissonProblem",
    "make_source",
    "shift_circuit",
    "shift_pauli",
    "laplacian_pauli",
    "laplacian_matrix",
    "cyclic_shift_matrix",
]
