"""Hardware-agnostic circuit representation.

Circuits are immutable values: every builder method returns a new circuit.
Qubit 0 is the least-significant bit of a basis-state label, i.e. the basis
state ``|q_{n-1} ... q_1 q_0>`` has index ``sum(q_i * 2**i)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import CircuitError

ONE_QUBIT = frozenset({"X", "Y", "Z", "H", "SX", "RX", "RY", "RZ", "Measure"})
TWO_QUBIT = frozenset({"CX", "CZ", "SWAP"})
ROTATIONS = frozenset({"RX", "RY", "RZ"})
GATE_NAMES = ONE_QUBIT | TWO_QUBIT | {"CCX", "MCX"}


@dataclass(frozen=True)
class Gate:
    """One gate application.

    For controlled gates the controls come first and the target last, so
    ``Gate("CX", (0, 1))`` flips qubit 1 when qubit 0 is set and
    ``Gate("MCX", (0, 1, 2, 3))`` has three controls. Rotations carry either a
    concrete ``angle`` or a symbolic ``param`` name, never both.
    """

    name: str
    qubits: tuple[int, ...]
    angle: float | None = None
    param: str | None = None

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise CircuitError(f"unknown gate {self.name!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.name} acts on repeated qubits {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        arity = len(self.qubits)
        if self.name in ONE_QUBIT:
            expected = arity == 1
        elif self.name in TWO_QUBIT:
            expected = arity == 2
        elif self.name == "CCX":
            expected = arity == 3
        else:
            expected = arity >= 3
        if not expected:
            raise CircuitError(f"{self.name} cannot act on {arity} qubit(s)")
        if self.name in ROTATIONS:
            if (self.angle is None) == (self.param is None):
                raise CircuitError(f"{self.name} needs exactly one of angle or param")
            if self.angle is not None:
                object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None or self.param is not None:
            raise CircuitError(f"{self.name} takes no angle")

    @property
    def num_controls(self) -> int:
        if self.name in ("CX", "CZ"):
            return 1
        if self.name in ("CCX", "MCX"):
            return len(self.qubits) - 1
        return 0

    @property
    def is_bound(self) -> bool:
        return self.param is None

    def remap(self, mapping: Sequence[int] | dict[int, int]) -> "Gate":
        return replace(self, qubits=tuple(mapping[q] for q in self.qubits))

    def to_line(self) -> str:
        line = f"{self.name} {','.join(map(str, self.qubits))}"
        if self.param is not None:
            line += f" @{self.param}"
        elif self.angle is not None:
            line += f" {self.angle!r}"
        return line


@dataclass(frozen=True)
class LogicalCircuit:
    """An ordered gate list on ``num_qubits`` abstract qubits.

    ``parameters`` is the binding order: ``bind_parameters(theta)`` assigns
    ``theta[i]`` to ``parameters[i]``.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    parameters: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        if len(set(self.parameters)) != len(self.parameters):
            raise CircuitError("duplicate entries in parameter table")
        table = set(self.parameters)
        measured: set[int] = set()
        for g in self.gates:
            self._check_gate(g, table, measured)

    def _check_gate(self, gate: Gate, table: set[str], measured: set[int]) -> None:
        if max(gate.qubits) >= self.num_qubits:
            raise CircuitError(
                f"{gate.name} on {gate.qubits} exceeds {self.num_qubits}-qubit register"
            )
        if gate.param is not None and gate.param not in table:
            raise CircuitError(f"parameter {gate.param!r} missing from table")
        if gate.name == "Measure":
            if gate.qubits[0] in measured:
                raise CircuitError(f"qubit {gate.qubits[0]} measured twice")
            measured.add(gate.qubits[0])
        elif measured:
            raise CircuitError("gates after measurement are not supported")

    # -- construction -------------------------------------------------------
    def append(self, gate: Gate) -> "LogicalCircuit":
        params = self.parameters
        if gate.param is not None and gate.param not in params:
            params = params + (gate.param,)
        measured = {g.qubits[0] for g in self.gates if g.name == "Measure"}
        self._check_gate(gate, set(params), measured)
        return LogicalCircuit(self.num_qubits, self.gates + (gate,), params)

    def extend(self, gates: Iterable[Gate]) -> "LogicalCircuit":
        gates = tuple(gates)
        params = list(self.parameters)
        for g in gates:
            if g.param is not None and g.param not in params:
                params.append(g.param)
        return LogicalCircuit(self.num_qubits, self.gates + gates, tuple(params))

    def add(self, name: str, *qubits: int, angle: float | None = None,
            param: str | None = None) -> "LogicalCircuit":
        """Shorthand for ``append(Gate(name, qubits, angle, param))``."""
        return self.append(Gate(name, qubits, angle, param))

    def compose(self, other: "LogicalCircuit",
                qubits: Sequence[int] | None = None) -> "LogicalCircuit":
        """Append ``other``'s gates, mapping its qubit ``i`` to ``qubits[i]``."""
        mapping = list(range(other.num_qubits)) if qubits is None else list(qubits)
        if len(mapping) != other.num_qubits:
            raise CircuitError("qubit map length must equal the composed circuit width")
        out = self.with_parameters(other.parameters)
        return out.extend(g.remap(mapping) for g in other.gates)

    def with_parameters(self, names: Iterable[str]) -> "LogicalCircuit":
        """Declare extra parameters (possibly unused by any gate)."""
        params = self.parameters + tuple(n for n in names if n not in self.parameters)
        return LogicalCircuit(self.num_qubits, self.gates, params)

    def widen(self, num_qubits: int) -> "LogicalCircuit":
        if num_qubits < self.num_qubits:
            raise CircuitError("cannot shrink a circuit")
        return LogicalCircuit(num_qubits, self.gates, self.parameters)

    def measure_all(self) -> "LogicalCircuit":
        return self.extend(Gate("Measure", (q,)) for q in range(self.num_qubits))

    # -- queries --------------------------------------------------------------
    @property
    def num_parameters(self) -> int:
        return len(self.parameters)

    @property
    def is_bound(self) -> bool:
        return not self.parameters

    def bind_parameters(self, theta: Sequence[float]) -> "LogicalCircuit":
        return bind_parameters(self, theta)

    def depth(self) -> int:
        return depth(self)

    def gate_counts(self) -> dict[str, int]:
        return gate_counts(self)

    def __len__(self) -> int:
        return len(self.gates)

    def dumps(self) -> str:
        return dumps(self)


def append(circuit: LogicalCircuit, gate: Gate) -> LogicalCircuit:
    return circuit.append(gate)


def bind_parameters(circuit: LogicalCircuit, theta: Sequence[float]) -> LogicalCircuit:
    """Replace every symbolic angle by ``theta`` in parameter-table order."""
    theta = list(theta)
    if len(theta) != len(circuit.parameters):
        raise CircuitError(
            f"expected {len(circuit.parameters)} parameter values, got {len(theta)}"
        )
    if not circuit.parameters:
        return circuit
    values = dict(zip(circuit.parameters, (float(t) for t in theta)))
    gates = tuple(
        replace(g, angle=values[g.param], param=None) if g.param is not None else g
        for g in circuit.gates
    )
    return LogicalCircuit(circuit.num_qubits, gates, ())


def depth(circuit: LogicalCircuit) -> int:
    """Number of layers in the as-soon-as-possible schedule."""
    level = [0] * circuit.num_qubits
    for g in circuit.gates:
        d = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = d
    return max(level, default=0)


def gate_counts(circuit: LogicalCircuit) -> dict[str, int]:
    return dict(Counter(g.name for g in circuit.gates))


def mcx_vchain(controls: Sequence[int], target: int,
               ancillas: Sequence[int] = ()) -> LogicalCircuit:
    """Multi-controlled X built from Toffolis onto clean ancillas.

    With ``k`` controls this uses ``k - 1`` ancillas: a compute chain of
    ``k - 1`` CCX gates accumulating the AND of all controls, one CX onto the
    target, and the mirrored uncompute chain. Ancillas must start in ``|0>``
    and are returned there. Two controls give a plain CCX.
    """
    controls = list(controls)
    k = len(controls)
    if k < 2:
        raise CircuitError("mcx_vchain needs at least two controls")
    ancillas = list(ancillas)
    if k > 2 and len(ancillas) < k - 1:
        raise CircuitError(f"{k} controls need {k - 1} ancillas, got {len(ancillas)}")
    used = controls + [target] + (ancillas[: k - 1] if k > 2 else [])
    if len(set(used)) != len(used):
        raise CircuitError("control, target and ancilla indices collide")
    width = max(used + ancillas) + 1
    if k == 2:
        return LogicalCircuit(width, (Gate("CCX", (controls[0], controls[1], target)),))
    anc = ancillas[: k - 1]
    compute = [Gate("CCX", (controls[0], controls[1], anc[0]))]
    for i in range(2, k):
        compute.append(Gate("CCX", (controls[i], anc[i - 2], anc[i - 1])))
    gates = compute + [Gate("CX", (anc[-1], target))] + compute[::-1]
    return LogicalCircuit(width, tuple(gates))


# -- text serialization ------------------------------------------------------
def dumps(circuit: LogicalCircuit) -> str:
    lines = [f"qubits {circuit.num_qubits}"]
    if circuit.parameters:
        lines.append("params " + ",".join(circuit.parameters))
    lines.extend(g.to_line() for g in circuit.gates)
    return "\n".join(lines) + "\n"


def loads(text: str) -> LogicalCircuit:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or not rows[0].startswith("qubits "):
        raise CircuitError("circuit text must start with 'qubits N'")
    circuit = LogicalCircuit(int(rows[0].split()[1]))
    for row in rows[1:]:
        parts = row.split()
        if parts[0] == "params":
            circuit = circuit.with_parameters(parts[1].split(","))
            continue
        qubits = tuple(int(q) for q in parts[1].split(","))
        angle = param = None
        if len(parts) > 2:
            if parts[2].startswith("@"):
                param = parts[2][1:]
            else:
                angle = float(parts[2])
        circuit = circuit.append(Gate(parts[0], qubits, angle, param))
    return circuit
