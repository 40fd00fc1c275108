"""Pauli strings and weighted Pauli sums.

A label is a string over ``IXYZ`` whose character ``i`` acts on qubit ``i``
(qubit 0 least significant), so ``"XI"`` is X on qubit 0. In Kronecker
notation that label is ``I (x) X``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .circuit import Gate, LogicalCircuit
from .errors import DimensionError, NonHermitianError, TooManyQubitsError

DROP_TOL = 1e-12
HERMITIAN_TOL = 1e-10
MAX_DENSE_QUBITS = 10

# (a, b) -> (phase, c) with a*b = phase*c
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def _masks(label: str) -> tuple[int, int, int]:
    """Bit masks (flip, phase, num_y) describing ``P|k> = i^y (-1)^{k.phase} |k ^ flip>``."""
    flip = phase = 0
    ny = 0
    for q, c in enumerate(label):
        if c in "XY":
            flip |= 1 << q
        if c in "YZ":
            phase |= 1 << q
        if c == "Y":
            ny += 1
    return flip, phase, ny


def _parity(values: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(values) & 1).astype(np.int64)


def pauli_action(label: str, num_qubits: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(rows, values)`` so that ``P[rows[k], k] = values[k]``."""
    n = len(label) if num_qubits is None else num_qubits
    k = np.arange(2**n, dtype=np.int64)
    flip, phase, ny = _masks(label)
    signs = 1 - 2 * _parity(k & phase)
    return k ^ flip, (1j**ny) * signs.astype(complex)


def apply_pauli(label: str, vec: np.ndarray) -> np.ndarray:
    rows, vals = pauli_action(label)
    out = np.empty_like(vec, dtype=complex)
    out[rows] = vals * vec
    return out


def pauli_matrix(label: str) -> np.ndarray:
    n = len(label)
    rows, vals = pauli_action(label)
    mat = np.zeros((2**n, 2**n), dtype=complex)
    mat[rows, np.arange(2**n)] = vals
    return mat


def _label_from_masks(x: int, z: int, n: int) -> str:
    return "".join("IXZY"[((x >> q) & 1) | (((z >> q) & 1) << 1)] for q in range(n))


def multiply_labels(a: str, b: str) -> tuple[complex, str]:
    phase = 1 + 0j
    chars = []
    for x, y in zip(a, b):
        p, c = _PRODUCT[(x, y)]
        phase *= p
        chars.append(c)
    return phase, "".join(chars)


@dataclass(frozen=True)
class PauliSum:
    """Canonical weighted sum of Pauli strings.

    Terms are merged, stripped of near-zero coefficients and sorted by label,
    so two sums describing the same operator compare equal term by term.
    """

    num_qubits: int
    terms: tuple[tuple[complex, str], ...] = ()

    def __post_init__(self):
        acc: dict[str, complex] = {}
        for coeff, label in self.terms:
            if len(label) != self.num_qubits or set(label) - set("IXYZ"):
                raise DimensionError(f"bad label {label!r} for {self.num_qubits} qubits")
            acc[label] = acc.get(label, 0j) + complex(coeff)
        terms = tuple(
            (c, lab) for lab, c in sorted(acc.items()) if abs(c) >= DROP_TOL
        )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_dict(cls, num_qubits: int, mapping: Mapping[str, complex]) -> "PauliSum":
        return cls(num_qubits, tuple((c, lab) for lab, c in mapping.items()))

    @classmethod
    def identity(cls, num_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(num_qubits, ((coeff, "I" * num_qubits),))

    def as_dict(self) -> dict[str, complex]:
        return {lab: c for c, lab in self.terms}

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._same_width(other)
        return PauliSum(self.num_qubits, self.terms + other.terms)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other * -1

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.num_qubits, tuple((c * scalar, lab) for c, lab in self.terms))

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        self._same_width(other)
        if not self.terms or not other.terms:
            return PauliSum(self.num_qubits)
        xa, za, ca = self._symplectic()
        xb, zb, cb = other._symplectic()
        x = xa[:, None] ^ xb[None, :]
        z = za[:, None] ^ zb[None, :]
        # label = i^{|x&z|} X^x Z^z and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1
        ones = lambda v: np.bitwise_count(v).astype(np.int64)  # noqa: E731
        power = (
            ones(xa & za)[:, None]
            + ones(xb & zb)[None, :]
            - ones(x & z)
            + 2 * ones(za[:, None] & xb[None, :])
        )
        coeff = ca[:, None] * cb[None, :] * (1j ** (power % 4))
        n = self.num_qubits
        keys = ((x.astype(np.int64) << n) | z).ravel()
        uniq, inverse = np.unique(keys, return_inverse=True)
        sums = np.zeros(uniq.shape[0], dtype=complex)
        np.add.at(sums, inverse, coeff.ravel())
        mask = (1 << n) - 1
        terms = tuple(
            (complex(c), _label_from_masks(int(k) >> n, int(k) & mask, n))
            for k, c in zip(uniq, sums)
        )
        return PauliSum(n, terms)

    def _symplectic(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xs, zs = [], []
        for _, lab in self.terms:
            flip, phase, _ = _masks(lab)
            xs.append(flip)
            zs.append(phase)
        coeffs = np.array([c for c, _ in self.terms], dtype=complex)
        return np.array(xs, dtype=np.int64), np.array(zs, dtype=np.int64), coeffs

    def dagger(self) -> "PauliSum":
        return PauliSum(self.num_qubits, tuple((np.conj(c), lab) for c, lab in self.terms))

    def tensor(self, other: "PauliSum") -> "PauliSum":
        """``other`` on the low qubits, ``self`` on the high ones."""
        return PauliSum(
            self.num_qubits + other.num_qubits,
            tuple((ca * cb, lb + la) for ca, la in self.terms for cb, lb in other.terms),
        )

    def _same_width(self, other: "PauliSum") -> None:
        if other.num_qubits != self.num_qubits:
            raise DimensionError("Pauli sums act on different qubit counts")

    def is_hermitian(self) -> bool:
        return is_hermitian(self)

    def to_matrix(self) -> np.ndarray:
        return to_matrix(self)

    @cached_property
    def _compiled(self) -> list[tuple[np.ndarray, np.ndarray]]:
        out = []
        for c, lab in self.terms:
            rows, vals = pauli_action(lab)
            out.append((rows, c * vals))
        return out

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Return ``self @ vec`` without forming a dense matrix."""
        vec = np.asarray(vec)
        if vec.shape[0] != 2**self.num_qubits:
            raise DimensionError("vector length does not match operator")
        out = np.zeros(vec.shape, dtype=complex)
        for rows, vals in self._compiled:
            out[rows] += vals * vec
        return out

    def dumps(self) -> str:
        return "".join(f"{c.real!r} {c.imag!r} {lab}\n" for c, lab in self.terms)

    @classmethod
    def loads(cls, text: str) -> "PauliSum":
        terms = []
        for line in text.splitlines():
            if not line.strip():
                continue
            re_, im_, lab = line.split()
            terms.append((complex(float(re_), float(im_)), lab))
        if not terms:
            raise DimensionError("empty Pauli sum text has no qubit count")
        return cls(len(terms[0][1]), tuple(terms))


def is_hermitian(ps: PauliSum) -> bool:
    return all(abs(c.imag) < HERMITIAN_TOL for c, _ in ps.terms)


def to_matrix(ps: PauliSum) -> np.ndarray:
    n = ps.num_qubits
    if n > MAX_DENSE_QUBITS:
        raise TooManyQubitsError(f"dense matrix capped at {MAX_DENSE_QUBITS} qubits")
    mat = np.zeros((2**n, 2**n), dtype=complex)
    cols = np.arange(2**n)
    for rows, vals in ps._compiled:
        mat[rows, cols] += vals
    return mat


def decompose_matrix(matrix: np.ndarray, tolerance: float = DROP_TOL) -> PauliSum:
    """Expand a ``2^n x 2^n`` matrix over all ``4^n`` Pauli strings.

    The coefficient of string ``P`` is ``Tr(P^dagger M) / 2^n``. This is the
    brute-force route; structured operators are better built analytically.
    """
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape[1] != dim or dim < 2 or dim & (dim - 1):
        raise DimensionError(f"expected a square power-of-two matrix, got {matrix.shape}")
    n = dim.bit_length() - 1
    cols = np.arange(dim)
    terms = []
    for chars in itertools.product("IXYZ", repeat=n):
        label = "".join(chars)
        rows, vals = pauli_action(label)
        coeff = np.sum(np.conj(vals) * matrix[rows, cols]) / dim
        if abs(coeff) > tolerance:
            terms.append((complex(coeff), label))
    return PauliSum(n, tuple(terms))


# -- measurement -------------------------------------------------------------
@dataclass(frozen=True)
class MeasurementBasis:
    """Rotation mapping one Pauli string onto a Z string, with its weight."""

    rotation: LogicalCircuit
    z_label: str
    weight: float
    label: str

    @property
    def z_mask(self) -> int:
        return sum(1 << q for q, c in enumerate(self.z_label) if c == "Z")


def measurement_bases(ps: PauliSum) -> tuple[list[MeasurementBasis], float]:
    """One basis change per non-identity term, plus the identity offset.

    X is rotated with H, Y with RX(pi/2) (which sends Y to Z).
    """
    if not is_hermitian(ps):
        raise NonHermitianError("measurement needs a Hermitian observable")
    n = ps.num_qubits
    bases = []
    offset = 0.0
    for c, label in ps.terms:
        if set(label) == {"I"}:
            offset += c.real
            continue
        gates = []
        for q, ch in enumerate(label):
            if ch == "X":
                gates.append(Gate("H", (q,)))
            elif ch == "Y":
                gates.append(Gate("RX", (q,), angle=np.pi / 2))
        z_label = "".join("I" if ch == "I" else "Z" for ch in label)
        bases.append(MeasurementBasis(LogicalCircuit(n, tuple(gates)), z_label, c.real, label))
    return bases, offset


def z_expectation_from_counts(counts: Mapping[str, int], z_mask: int) -> tuple[float, float]:
    """Mean parity of the masked bits and its standard error."""
    shots = sum(counts.values())
    total = 0
    for bits, cnt in counts.items():
        k = int(bits, 2)
        total += cnt * (1 - 2 * (bin(k & z_mask).count("1") & 1))
    mean = total / shots
    stderr = float(np.sqrt(max(1.0 - mean**2, 0.0) / shots))
    return mean, stderr


def single_term(num_qubits: int, ops: Mapping[int, str], coeff: complex = 1.0) -> PauliSum:
    """Build ``coeff * P`` with ``ops`` mapping qubit index to X, Y or Z."""
    chars = ["I"] * num_qubits
    for q, c in ops.items():
        chars[q] = c
    return PauliSum(num_qubits, ((coeff, "".join(chars)),))


def combine(terms: Iterable[PauliSum]) -> PauliSum:
    terms = list(terms)
    return PauliSum(terms[0].num_qubits, tuple(t for ps in terms for t in ps.terms))
