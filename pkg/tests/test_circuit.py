import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutrecon.circuit import (
    Circuit,
    CircuitError,
    CutError,
    CutMarker,
    Gate,
    build_dag,
    gate_node,
    parse_circuit,
    partition_circuit,
    render_circuit,
    source_node,
    validate_cut_set,
)
from conftest import random_cascade


def test_parse_simple():
    c = parse_circuit("qubits 2\nh 0\ncx 0 1\n")
    assert c == Circuit(2, (Gate("H", (0,)), Gate("CX", (0, 1))))
    assert c.cuts == ()


def test_parse_cut_directive():
    c = parse_circuit("qubits 2\nh 0\ncut 0 after 0\ncx 0 1\n")
    assert c.cuts == (CutMarker(0, 0),)
    assert [g.kind for g in c.gates] == ["H", "CX"]


def test_parse_comments_angles_and_forward_cuts():
    text = """
    # leading comment
    qubits 3   # width
    rx 0 1.25
    cut 1 after 2
    h 1
    cz 1 2
    """
    c = parse_circuit(text)
    assert c.gates[0] == Gate("RX", (0,), 1.25)
    assert c.cuts == (CutMarker(1, 2),)


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        ("qubits 2\nh 5\n", "out of range", 2),
        ("qubits 2\nfoo 0\n", "unknown gate", 2),
        ("h 0\n", "first statement", 1),
        ("qubits 2\ncx 0\n", "expects 2", 2),
        ("qubits 2\nrx 0\n", "expects 2", 2),
        ("qubits 2\nh 0 0.5\n", "expects 1", 2),
        ("qubits 2\ncx 1 1\n", "distinct", 2),
        ("qubits 2\nh 0\ncut 0 after 0\ncut 0 after 0\n", "duplicate", 4),
        ("qubits 2\nh 0\ncut 1 after 0\n", "does not act", 3),
        ("qubits 2\nh 0\ncut 0 after 7\n", "missing gate", 3),
        ("qubits 2\nh x\n", "expected integer", 2),
        ("qubits 2\nrz 0 nan\n", "finite", 2),
    ],
)
def test_parse_errors(text, fragment, line):
    with pytest.raises(CircuitError, match=fragment) as info:
        parse_circuit(text)
    assert info.value.line == line


def test_gate_invariants():
    with pytest.raises(CircuitError):
        Gate("RX", (0,))
    with pytest.raises(CircuitError):
        Gate("H", (0,), 0.3)
    with pytest.raises(CircuitError):
        Circuit(2, (Gate("H", (0,)),), (CutMarker(1, 0),))


gate_strategy = st.one_of(
    st.builds(lambda k, q: (k, (q,), None), st.sampled_from(["H", "X", "Y", "Z", "S", "T"]), st.integers(0, 4)),
    st.builds(
        lambda k, q, a: (k, (q,), a),
        st.sampled_from(["RX", "RY", "RZ"]),
        st.integers(0, 4),
        st.floats(-10, 10, allow_nan=False),
    ),
    st.builds(
        lambda k, qs: (k, tuple(qs), None),
        st.sampled_from(["CX", "CZ"]),
        st.lists(st.integers(0, 4), min_size=2, max_size=2, unique=True),
    ),
)


@st.composite
def circuits(draw):
    width = draw(st.integers(1, 5))
    raw = draw(st.lists(gate_strategy, max_size=12))
    gates = tuple(Gate(k, q, a) for k, q, a in raw if max(q) < width)
    cuts = []
    if gates:
        for index in draw(st.lists(st.integers(0, len(gates) - 1), max_size=3, unique=True)):
            cuts.append(CutMarker(gates[index].qubits[0], index))
    return Circuit(width, gates, tuple(cuts))


@given(circuits())
@settings(max_examples=200, deadline=None)
def test_render_parse_round_trip(c):
    assert parse_circuit(render_circuit(c)) == c


@given(circuits())
@settings(max_examples=200, deadline=None)
def test_dag_shape(c):
    dag = build_dag(c)
    g = dag.graph
    assert nx.is_directed_acyclic_graph(g)
    assert g.number_of_edges() == sum(gate.arity for gate in c.gates)
    assert g.number_of_nodes() == c.width + len(c.gates)
    for i, gate in enumerate(c.gates):
        node = gate_node(i)
        assert g.in_degree(node) == gate.arity
        # a gate's outgoing edges are the segments consumed by later gates
        assert g.out_degree(node) <= gate.arity
    # edges only point forward in gate order
    for u, v in g.edges():
        if u[0] == "g":
            assert u[1] < v[1]


def test_dag_bell_structure():
    dag = build_dag(parse_circuit("qubits 2\nh 0\ncx 0 1\n"))
    edges = sorted((u, v, d["wire"]) for u, v, d in dag.graph.edges(data=True))
    assert edges == sorted([
        (source_node(0), gate_node(0), 0),
        (gate_node(0), gate_node(1), 0),
        (source_node(1), gate_node(1), 1),
    ])


def test_dag_empty_circuit():
    g = build_dag(Circuit(3)).graph
    assert g.number_of_nodes() == 3 and g.number_of_edges() == 0


def test_dag_parallel_edges():
    g = build_dag(parse_circuit("qubits 2\ncx 0 1\ncz 0 1\n")).graph
    assert g.number_of_edges(gate_node(0), gate_node(1)) == 2


def test_one_cut_partition(bell):
    p = partition_circuit(bell)
    up, down = p.subcircuits
    assert p.cut_roles == ((0, 1),)
    assert up.gate_indices == (0,) and up.output_wires == () and up.upstream_cuts == (0,)
    assert down.gate_indices == (1,) and down.output_wires == (0, 1) and down.downstream_cuts == (0,)
    assert up.rank == 3 and down.rank == 3
    # downstream CX acts on local qubits (wire 0 piece 1, wire 1)
    assert down.gates[0].qubits == (0, 1)


def test_upstream_keeps_first_qubits():
    # A on wires 0..2, B on 2..4, cut on the shared wire 2
    c = random_cascade([3, 3], seed=4)
    p = partition_circuit(c)
    a, b = p.subcircuits
    assert a.output_wires == (0, 1)
    assert b.output_wires == (2, 3, 4)
    assert [s.wire for s in a.segments] == [0, 1, 2]
    assert [s.wire for s in b.segments] == [2, 3, 4]


def test_two_cut_cascade(ghz_cascade):
    p = partition_circuit(ghz_cascade)
    assert len(p.subcircuits) == 3
    a, b, c = p.subcircuits
    assert p.cut_roles == ((0, 1), (1, 2))
    assert b.downstream_cuts == (0,) and b.upstream_cuts == (1,)
    assert b.terminals == (("e", 0), ("a", 1))
    assert [s.rank for s in p.subcircuits] == [3, 5, 3]


def test_random_cascade_components():
    for k in (1, 2, 3):
        c = random_cascade([3] * (k + 1), seed=k)
        assert len(partition_circuit(c).subcircuits) == k + 1


def test_cut_that_does_not_separate():
    # wire 0 and 1 are still joined by the later cz after cutting wire 0 once
    c = parse_circuit("qubits 2\nh 0\ncx 0 1\nh 0\ncz 0 1\ncut 0 after 1\n")
    with pytest.raises(CutError, match="does not disconnect"):
        partition_circuit(c)


def test_idle_wire_becomes_its_own_subcircuit():
    c = parse_circuit("qubits 2\nh 0\nh 0\nh 1\ncut 0 after 0\n")
    p = partition_circuit(c)
    assert [s.gate_indices for s in p.subcircuits] == [(0,), (1,), (2,)]
    assert p.subcircuits[2].terminals == ()


def test_cut_on_final_segment():
    c = parse_circuit("qubits 2\nh 0\ncx 0 1\ncut 1 after 1\n")
    with pytest.raises(CutError, match="does not map"):
        partition_circuit(c)


def test_same_wire_cut_twice_creates_middle_piece():
    c = parse_circuit("qubits 1\nh 0\nx 0\nh 0\ncut 0 after 0\ncut 0 after 1\n")
    p = partition_circuit(c)
    assert [s.gate_indices for s in p.subcircuits] == [(0,), (1,), (2,)]
    mid = p.subcircuits[1]
    assert mid.segments[0].init_cut == 0 and mid.segments[0].meas_cut == 1


def test_validate_explicit_cut_list(bell):
    dag = build_dag(bell.without_cuts())
    p = validate_cut_set(dag, [CutMarker(0, 0)])
    assert len(p.subcircuits) == 2
    with pytest.raises(CutError):
        validate_cut_set(dag, [])


@given(st.integers(0, 10_000), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_components_bound(seed, k):
    c = random_cascade([2] * (k + 1), seed=seed)
    p = partition_circuit(c)
    assert len(p.subcircuits) <= k + 1
    # every wire's output bit lands in exactly one subcircuit
    outs = sorted(w for s in p.subcircuits for w in s.output_wires)
    assert outs == list(range(c.width))
