import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvqa.circuit import Gate, LogicalCircuit, append, depth, dumps, gate_counts, loads, mcx_vchain
from pvqa.errors import CircuitError
from pvqa.simulator import circuit_unitary


def test_append_returns_new_circuit():
    c = LogicalCircuit(1)
    c2 = append(c, Gate("X", (0,)))
    assert len(c) == 0 and len(c2) == 1


def test_duplicate_qubits_rejected():
    with pytest.raises(CircuitError):
        LogicalCircuit(2).add("CX", 0, 0)


def test_out_of_range_rejected():
    with pytest.raises(CircuitError):
        LogicalCircuit(2).add("X", 2)


def test_parameter_table_grows_on_symbolic_rotation():
    c = LogicalCircuit(2).add("RY", 1, param="t0")
    assert c.parameters == ("t0",)


def test_rotation_needs_angle_or_param():
    with pytest.raises(CircuitError):
        Gate("RY", (0,))
    with pytest.raises(CircuitError):
        Gate("RY", (0,), angle=1.0, param="a")
    with pytest.raises(CircuitError):
        Gate("X", (0,), angle=1.0)


def test_bind_parameters():
    c = LogicalCircuit(1).add("RY", 0, param="t0")
    bound = c.bind_parameters([np.pi])
    assert bound.gates[0] == Gate("RY", (0,), angle=np.pi)
    assert bound.parameters == ()
    empty = LogicalCircuit(1).add("X", 0)
    assert empty.bind_parameters([]) == empty
    two = c.add("RY", 0, param="t1")
    with pytest.raises(CircuitError):
        two.bind_parameters([1.0])


def test_binding_is_idempotent_on_bound_circuits():
    c = LogicalCircuit(1).add("RY", 0, angle=0.3)
    assert c.bind_parameters([]) == c


def test_depth_examples():
    assert depth(LogicalCircuit(2)) == 0
    assert depth(LogicalCircuit(2).add("X", 0).add("X", 1)) == 1
    assert depth(LogicalCircuit(2).add("H", 0).add("CX", 0, 1).add("X", 1)) == 3


def test_depth_of_concatenation_is_subadditive():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = LogicalCircuit(3), LogicalCircuit(3)
        for _ in range(6):
            i, j = rng.choice(3, 2, replace=False)
            a = a.add("CX", int(i), int(j)) if rng.random() < 0.5 else a.add("H", int(i))
            b = b.add("X", int(j))
        assert depth(a.compose(b)) <= depth(a) + depth(b)


def test_gate_counts():
    assert gate_counts(LogicalCircuit(2)) == {}
    c = LogicalCircuit(2).add("H", 0).add("CX", 0, 1).add("CX", 0, 1)
    assert gate_counts(c) == {"H": 1, "CX": 2}


def test_mcx_vchain_counts():
    assert mcx_vchain([0, 1], 2).gates == (Gate("CCX", (0, 1, 2)),)
    frag = mcx_vchain([0, 1, 2], 3, [4, 5])
    assert gate_counts(frag) == {"CCX": 4, "CX": 1}
    with pytest.raises(CircuitError):
        mcx_vchain([0, 1, 2], 3, [4])
    with pytest.raises(CircuitError):
        mcx_vchain([0, 1, 2], 3, [2, 5])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_mcx_vchain_matches_permutation_on_clean_ancillas(k):
    controls = list(range(k))
    target = k
    ancillas = list(range(k + 1, 2 * k))
    frag = mcx_vchain(controls, target, ancillas)
    u = circuit_unitary(frag.widen(2 * k))
    dim = 2 ** (k + 1)
    for idx in range(dim):
        out = idx ^ (1 << target) if all((idx >> c) & 1 for c in controls) else idx
        col = u[:, idx]
        assert abs(col[out]) == pytest.approx(1.0, abs=1e-12)


def test_measure_must_be_terminal():
    c = LogicalCircuit(1).add("Measure", 0)
    with pytest.raises(CircuitError):
        c.add("X", 0)


def test_text_round_trip():
    c = (LogicalCircuit(3).add("H", 0).add("RY", 1, param="a").add("RZ", 2, angle=0.25)
         .add("MCX", 0, 1, 2))
    text = dumps(c)
    assert text.splitlines()[0] == "qubits 3"
    assert loads(text) == c


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["X", "H", "RY", "CX", "CZ", "SWAP"]),
                          st.integers(0, 3), st.integers(0, 3),
                          st.floats(-6.3, 6.3, allow_nan=False)), max_size=12))
def test_text_round_trip_property(spec):
    c = LogicalCircuit(4)
    for name, a, b, ang in spec:
        if name in ("CX", "CZ", "SWAP"):
            if a == b:
                continue
            c = c.add(name, a, b)
        elif name == "RY":
            c = c.add(name, a, angle=ang)
        else:
            c = c.add(name, a)
    assert loads(dumps(c)) == c
