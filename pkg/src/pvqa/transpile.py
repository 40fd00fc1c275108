"""Physical circuit lowering: basis decomposition, SWAP routing, noise proxies."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuit import Gate, LogicalCircuit, depth, gate_counts, mcx_vchain
from .errors import CircuitError, TranspileError
from .simulator import NoiseModel

BASIS = frozenset({"RX", "RY", "RZ", "SX", "X", "CX"})
PI = np.pi


@dataclass(frozen=True)
class CouplingMap:
    num_physical_qubits: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on qubit {a}")
            if not (0 <= a < self.num_physical_qubits and 0 <= b < self.num_physical_qubits):
                raise ValueError(f"edge {(a, b)} outside the device")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.num_physical_qubits > 1 and len(self._component(0)) != self.num_physical_qubits:
            raise ValueError("coupling map is not connected")

    @classmethod
    def linear(cls, n: int) -> "CouplingMap":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def full(cls, n: int) -> "CouplingMap":
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    def neighbours(self, q: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == q} | {a for a, b in self.edges if b == q})

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def _component(self, start: int) -> set[int]:
        seen = {start}
        todo = [start]
        while todo:
            q = todo.pop()
            for nb in self.neighbours(q):
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return seen

    def shortest_path(self, src: int, dst: int) -> list[int]:
        """BFS path; ties go to the lower-index neighbour."""
        prev = {src: None}
        queue = deque([src])
        while queue:
            q = queue.popleft()
            if q == dst:
                break
            for nb in self.neighbours(q):
                if nb not in prev:
                    prev[nb] = q
                    queue.append(nb)
        path = [dst]
        while path[-1] != src:
            path.append(prev[path[-1]])
        return path[::-1]


@dataclass(frozen=True)
class PhysicalCircuit:
    coupling: CouplingMap
    gates: tuple[Gate, ...]
    layout: tuple[int, ...]
    final_layout: tuple[int, ...]
    swap_count: int = 0

    def __post_init__(self):
        for g in self.gates:
            if g.name not in BASIS and g.name != "Measure":
                raise TranspileError(f"non-basis gate {g.name} in physical circuit")
            if len(g.qubits) == 2 and not self.coupling.adjacent(*g.qubits):
                raise TranspileError(f"{g.name}{g.qubits} is not on a coupling edge")

    def as_logical(self) -> LogicalCircuit:
        return LogicalCircuit(self.coupling.num_physical_qubits, self.gates)

    def depth(self) -> int:
        return depth(self.as_logical())

    def gate_counts(self) -> dict[str, int]:
        return gate_counts(self.as_logical())

    @property
    def cx_count(self) -> int:
        return sum(1 for g in self.gates if g.name == "CX")


# -- basis decomposition -------------------------------------------------------
def _h(q: int) -> list[Gate]:
    return [Gate("RZ", (q,), angle=PI / 2), Gate("SX", (q,)), Gate("RZ", (q,), angle=PI / 2)]


def _ccx(a: int, b: int, t: int) -> list[Gate]:
    def rz(q, ang):
        return Gate("RZ", (q,), angle=ang)

    def cx(c, x):
        return Gate("CX", (c, x))

    return [
        *_h(t), cx(b, t), rz(t, -PI / 4), cx(a, t), rz(t, PI / 4), cx(b, t),
        rz(t, -PI / 4), cx(a, t), rz(b, PI / 4), rz(t, PI / 4), *_h(t),
        cx(a, b), rz(a, PI / 4), rz(b, -PI / 4), cx(a, b),
    ]


def _lower(g: Gate) -> list[Gate]:
    name, qs = g.name, g.qubits
    if name in BASIS or name == "Measure":
        return [g]
    if name == "H":
        return _h(qs[0])
    if name == "Y":
        return [Gate("RY", qs, angle=PI)]
    if name == "Z":
        return [Gate("RZ", qs, angle=PI)]
    if name == "CZ":
        a, t = qs
        return [*_h(t), Gate("CX", (a, t)), *_h(t)]
    if name == "SWAP":
        a, b = qs
        return [Gate("CX", (a, b)), Gate("CX", (b, a)), Gate("CX", (a, b))]
    if name == "CCX":
        return _ccx(*qs)
    if name == "MCX":
        raise TranspileError("MCX must be expanded (vchain) before basis decomposition")
    raise TranspileError(f"cannot decompose {name}")


def decompose_to_basis(circuit: LogicalCircuit) -> LogicalCircuit:
    """Rewrite into {RX, RY, RZ, SX, X, CX}; equal to the input up to global phase."""
    if not circuit.is_bound:
        raise CircuitError("decompose_to_basis needs a fully bound circuit")
    gates = tuple(lg for g in circuit.gates for lg in _lower(g))
    return LogicalCircuit(circuit.num_qubits, gates)


def expand_mcx(circuit: LogicalCircuit) -> LogicalCircuit:
    """Replace every MCX by its V-chain, appending shared clean ancillas."""
    need = max((g.num_controls - 1 for g in circuit.gates if g.name == "MCX"), default=0)
    n = circuit.num_qubits
    ancillas = list(range(n, n + need))
    gates: list[Gate] = []
    for g in circuit.gates:
        if g.name == "MCX":
            gates.extend(mcx_vchain(g.qubits[:-1], g.qubits[-1], ancillas).gates)
        else:
            gates.append(g)
    return LogicalCircuit(n + need, tuple(gates), circuit.parameters)


# -- routing --------------------------------------------------------------------
def route(circuit: LogicalCircuit, coupling: CouplingMap,
          initial_layout: Iterable[int] | None = None) -> PhysicalCircuit:
    """Greedy shortest-path SWAP insertion.

    A two-qubit gate on non-adjacent qubits walks its first qubit along the
    shortest path until it neighbours the second, each hop costing one SWAP
    written as three CX. No lookahead.
    """
    n_log, n_phys = circuit.num_qubits, coupling.num_physical_qubits
    if n_log > n_phys:
        raise TranspileError(f"{n_log} logical qubits do not fit on {n_phys} physical ones")
    layout = list(range(n_log)) if initial_layout is None else list(initial_layout)
    if len(layout) != n_log or len(set(layout)) != n_log or max(layout) >= n_phys:
        raise TranspileError(f"bad initial layout {layout}")
    l2p = list(layout)
    p2l = {p: lq for lq, p in enumerate(l2p)}
    out: list[Gate] = []
    swaps = 0
    for g in circuit.gates:
        if len(g.qubits) == 1:
            out.append(g.remap(l2p))
            continue
        if len(g.qubits) != 2 or g.name not in BASIS:
            raise TranspileError(f"route expects basis gates, got {g.name}")
        a, b = g.qubits
        path = coupling.shortest_path(l2p[a], l2p[b])
        for p, nxt in zip(path[:-2], path[1:-1]):
            out.extend([Gate("CX", (p, nxt)), Gate("CX", (nxt, p)), Gate("CX", (p, nxt))])
            swaps += 1
            la, lb = p2l.get(p), p2l.get(nxt)
            if la is not None:
                l2p[la] = nxt
            if lb is not None:
                l2p[lb] = p
            p2l[p], p2l[nxt] = lb, la
        out.append(g.remap(l2p))
    return PhysicalCircuit(coupling, tuple(out), tuple(layout), tuple(l2p), swaps)


def transpile(circuit: LogicalCircuit, coupling: CouplingMap | None = None,
              expand: bool = True, initial_layout: Iterable[int] | None = None) -> PhysicalCircuit:
    """MCX expansion, basis decomposition, then routing.

    ``coupling=None`` targets an all-to-all device of the circuit's width.
    """
    if expand:
        circuit = expand_mcx(circuit)
    basis = decompose_to_basis(circuit)
    if coupling is None:
        coupling = CouplingMap.full(max(basis.num_qubits, 1))
    return route(basis, coupling, initial_layout)


# -- noise ----------------------------------------------------------------------
# Order-of-magnitude placeholders, not calibrated to any device.
OSAKA_LIKE = NoiseModel(eps_1q=0.0003, eps_2q=0.008, eps_3q=0.024)


def noise_model_factory(profile: str, eps_1q: float | None = None, eps_2q: float | None = None,
                        eps_3q: float | None = None) -> NoiseModel:
    """Resolve a named noise profile: ``ideal``, ``uniform-depolarizing`` or ``osaka-like``."""
    if profile == "ideal":
        return NoiseModel()
    if profile == "osaka-like":
        return OSAKA_LIKE
    if profile in ("uniform-depolarizing", "uniform"):
        if eps_1q is None or eps_2q is None:
            raise ValueError("uniform-depolarizing needs eps_1q and eps_2q")
        return NoiseModel(eps_1q, eps_2q, 3 * eps_2q if eps_3q is None else eps_3q)
    raise ValueError(f"unknown noise profile {profile!r}")


NOISE_PROFILES = ("ideal", "uniform-depolarizing", "osaka-like")


def fidelity_product(circuit: PhysicalCircuit | LogicalCircuit, noise: NoiseModel) -> float:
    """Product of per-gate success probabilities ``prod (1 - eps)``."""
    out = 1.0
    for g in circuit.gates:
        if g.name != "Measure":
            out *= 1.0 - noise.error_rate(g)
    return out


def embed_state(vec: np.ndarray, layout: Iterable[int], num_physical: int) -> np.ndarray:
    """Place a logical statevector on physical qubits; unused qubits are ``|0>``.

    ``layout[i]`` is the physical home of logical qubit ``i``. Used to compare
    a routed circuit's output, read through ``final_layout``, with the
    logical circuit's output.
    """
    layout = list(layout)
    vec = np.asarray(vec)
    out = np.zeros(2**num_physical, dtype=complex)
    for k, amp in enumerate(vec):
        idx = sum(((k >> lq) & 1) << p for lq, p in enumerate(layout))
        out[idx] = amp
    return out


__all__ = [
    "BASIS", "CouplingMap", "PhysicalCircuit", "decompose_to_basis", "expand_mcx",
    "route", "transpile", "noise_model_factory", "fidelity_product", "OSAKA_LIKE",
    "NOISE_PROFILES", "embed_state",
]
