"""Parameterized ansatz families and real amplitude encoding.

All trainable rotations are RY, so every state these circuits produce from
``|0...0>`` has real amplitudes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .circuit import Gate, LogicalCircuit
from .errors import CircuitError

FAMILIES = ("hea", "mps", "custom-mps", "ttn", "ttnpp")
_ALIASES = {
    "hea": "hea",
    "mps": "mps",
    "custom-mps": "custom-mps",
    "custommps": "custom-mps",
    "custom_mps": "custom-mps",
    "ttn": "ttn",
    "ttnpp": "ttnpp",
    "ttn++": "ttnpp",
}


def canonical_family(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown ansatz family {name!r}; choose from {FAMILIES}") from None


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class AnsatzSpec:
    family: str
    num_qubits: int
    layers: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", canonical_family(self.family))
        if self.num_qubits < 1:
            raise ValueError("ansatz needs at least one qubit")
        if self.layers < 1:
            raise ValueError("ansatz needs at least one layer")
        if self.family == "ttn" and not _is_power_of_two(self.num_qubits):
            raise ValueError(
                f"ttn needs a power-of-two qubit count, got {self.num_qubits}; use ttnpp"
            )


class _Builder:
    """Accumulates gates and hands out fresh parameter names in order."""

    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self.gates: list[Gate] = []
        self.params: list[str] = []

    def ry(self, q: int) -> None:
        name = f"theta_{len(self.params)}"
        self.params.append(name)
        self.gates.append(Gate("RY", (q,), param=name))

    def block(self, a: int, b: int, entangler: str = "CX") -> None:
        self.ry(a)
        self.ry(b)
        self.gates.append(Gate(entangler, (a, b)))

    def circuit(self) -> LogicalCircuit:
        return LogicalCircuit(self.num_qubits, tuple(self.gates), tuple(self.params))


def _hea_layer(b: _Builder) -> None:
    for q in range(b.num_qubits):
        b.ry(q)
    for q in range(b.num_qubits - 1):
        b.gates.append(Gate("CX", (q, q + 1)))


def _staircase(entangler: str) -> Callable[[_Builder], None]:
    def layer(b: _Builder) -> None:
        for q in range(b.num_qubits - 1):
            b.block(q, q + 1, entangler)
    return layer


def _tree_layer(b: _Builder, extended: bool) -> None:
    n = b.num_qubits
    m = 1 << (n.bit_length() - 1)
    reps = list(range(m))
    level = 0
    while len(reps) > 1:
        merged = []
        for i in range(0, len(reps), 2):
            # the higher index of each pair represents the merged subtree
            b.block(reps[i], reps[i + 1])
            merged.append(reps[i + 1])
        reps = merged
        level += 1
        if extended and level == 1:
            for q in range(m, n):
                b.block(q, m - 1)


_LAYERS: dict[str, Callable[[_Builder], None]] = {
    "hea": _hea_layer,
    "mps": _staircase("CX"),
    "custom-mps": _staircase("CZ"),
    "ttn": lambda b: _tree_layer(b, extended=False),
    "ttnpp": lambda b: _tree_layer(b, extended=True),
}


def build_ansatz(spec: AnsatzSpec) -> LogicalCircuit:
    """Parameterized circuit for ``spec``.

    Per layer: ``hea`` puts RY on every qubit then a CX chain; ``mps`` and
    ``custom-mps`` run a staircase of (RY, RY, CX/CZ) blocks over neighbours;
    ``ttn`` merges sibling subtrees pairwise up a binary tree; ``ttnpp`` builds
    the tree on the largest power-of-two prefix and, right after the leaf
    level, attaches every leftover qubit to qubit ``m - 1``. The two-qubit
    families use ``2 (n - 1)`` parameters per layer. A single qubit has no
    bonds, so every family degenerates to one RY per layer there.
    """
    b = _Builder(spec.num_qubits)
    for _ in range(spec.layers):
        if spec.num_qubits == 1:
            b.ry(0)
        else:
            _LAYERS[spec.family](b)
    return b.circuit()


ANSATZ_FACTORIES: dict[str, Callable[[int, int], LogicalCircuit]] = {
    fam: (lambda n, layers, fam=fam: build_ansatz(AnsatzSpec(fam, n, layers)))
    for fam in FAMILIES
}


# -- amplitude encoding ----------------------------------------------------------
def _gray(i: int) -> int:
    return i ^ (i >> 1)


def uniformly_controlled_ry(angles: Sequence[float], controls: Sequence[int],
                            target: int) -> list[Gate]:
    """RY on ``target`` by ``angles[j]`` when the controls read ``j``.

    Bit ``i`` of ``j`` is the value of ``controls[i]``. Decomposed into
    ``2^m`` RY and ``2^m`` CX gates along a Gray-code walk.
    """
    angles = np.asarray(angles, dtype=float)
    m = len(controls)
    if angles.shape[0] != 2**m:
        raise CircuitError("need one angle per control pattern")
    if np.all(np.abs(angles) < 1e-14):
        return []
    if m == 0:
        return [Gate("RY", (target,), angle=float(angles[0]))]
    size = 2**m
    idx = np.arange(size)
    gray = np.array([_gray(i) for i in range(size)])
    signs = np.array([[1 - 2 * (bin(j & g).count("1") & 1) for j in idx] for g in gray])
    thetas = signs @ angles / size
    gates = []
    for i in range(size):
        gates.append(Gate("RY", (target,), angle=float(thetas[i])))
        changed = _gray(i) ^ _gray((i + 1) % size)
        gates.append(Gate("CX", (controls[changed.bit_length() - 1], target)))
    return gates


def amplitude_encode(f: Sequence[float], num_qubits: int) -> LogicalCircuit:
    """Circuit preparing ``f / ||f||`` from ``|0...0>`` for real ``f``.

    Works top-down: qubit ``n-1`` splits the norm between the two halves,
    each lower qubit is rotated under uniform control of the qubits above it,
    and qubit 0 uses signed angles so negative entries come out right.
    """
    f = np.asarray(f)
    if np.iscomplexobj(f):
        raise ValueError("amplitude encoding takes real vectors only")
    f = f.astype(float).reshape(-1)
    if f.shape[0] != 2**num_qubits:
        raise ValueError(f"vector length {f.shape[0]} does not match {num_qubits} qubits")
    norm = np.linalg.norm(f)
    if norm == 0:
        raise ValueError("cannot encode the zero vector")
    f = f / norm
    gates: list[Gate] = []
    for t in range(num_qubits - 1, -1, -1):
        m = num_qubits - 1 - t
        split = f.reshape(2**m, 2, 2**t)
        if t == 0:
            angles = 2 * np.arctan2(split[:, 1, 0], split[:, 0, 0])
        else:
            norms = np.linalg.norm(split, axis=2)
            angles = 2 * np.arctan2(norms[:, 1], norms[:, 0])
        gates.extend(uniformly_controlled_ry(angles, list(range(t + 1, num_qubits)), t))
    return LogicalCircuit(num_qubits, tuple(gates))


STATE_PREP_FACTORIES: dict[str, Callable[[Sequence[float], int], LogicalCircuit]] = {
    "amplitude": amplitude_encode,
}


# -- control ----------------------------------------------------------------------
def _controlled_gates(g: Gate, c: int) -> list[Gate]:
    name, qs = g.name, g.qubits
    if name == "X":
        return [Gate("CX", (c, qs[0]))]
    if name == "Z":
        return [Gate("CZ", (c, qs[0]))]
    if name == "Y":
        # Y = S X S^dagger; the RZ phases cancel on the uncontrolled branch
        t = qs[0]
        return [Gate("RZ", (t,), angle=-np.pi / 2), Gate("CX", (c, t)),
                Gate("RZ", (t,), angle=np.pi / 2)]
    if name == "SX":
        # SX = e^{i pi/4} RX(pi/2); the phase becomes an RZ on the control
        return [*_controlled_gates(Gate("RX", qs, angle=np.pi / 2), c),
                Gate("RZ", (c,), angle=np.pi / 4)]
    if name in ("RY", "RZ"):
        half = g.angle / 2
        return [Gate(name, qs, angle=half), Gate("CX", (c, qs[0])),
                Gate(name, qs, angle=-half), Gate("CX", (c, qs[0]))]
    if name == "RX":
        t = qs[0]
        return [Gate("H", (t,)), *_controlled_gates(Gate("RZ", (t,), angle=g.angle), c),
                Gate("H", (t,))]
    if name == "H":
        # H = RY(pi/2) Z
        return [Gate("CZ", (c, qs[0])),
                *_controlled_gates(Gate("RY", qs, angle=np.pi / 2), c)]
    if name == "CX":
        return [Gate("CCX", (c, *qs))]
    if name in ("CCX", "MCX"):
        return [Gate("MCX", (c, *qs))]
    if name == "CZ":
        a, t = qs
        return [Gate("H", (t,)), Gate("CCX", (c, a, t)), Gate("H", (t,))]
    if name == "SWAP":
        a, t = qs
        return [Gate("CX", (t, a)), Gate("CCX", (c, a, t)), Gate("CX", (t, a))]
    raise CircuitError(f"no controlled form for {name}")


def controlled_version(circuit: LogicalCircuit, control: int) -> LogicalCircuit:
    """Same circuit, every gate conditioned on ``control`` being ``|1>``."""
    if not circuit.is_bound:
        raise CircuitError("controlled_version needs a fully bound circuit")
    if control < circuit.num_qubits and any(control in g.qubits for g in circuit.gates):
        raise CircuitError(f"control qubit {control} is used by the circuit")
    width = max(circuit.num_qubits, control + 1)
    gates = [cg for g in circuit.gates for cg in _controlled_gates(g, control)]
    return LogicalCircuit(width, tuple(gates))
