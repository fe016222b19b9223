"""Circuit representation, the line-oriented text format, and cut partitioning.

A circuit is an ordered list of gates over ``width`` qubits. Cuts are named
by ``(wire, after_gate)``: the wire segment leaving gate ``after_gate`` on
``wire``. Partitioning maps the circuit onto a directed multigraph (one
source vertex per qubit, one vertex per gate, one edge per wire segment),
removes the cut edges and reads the subcircuits off the connected
components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import networkx as nx

SINGLE_QUBIT = ("H", "X", "Y", "Z", "S", "T", "RX", "RY", "RZ")
TWO_QUBIT = ("CX", "CZ")
ROTATIONS = ("RX", "RY", "RZ")
GATE_KINDS = SINGLE_QUBIT + TWO_QUBIT


class CircuitError(ValueError):
    """Malformed circuit text or invalid circuit structure."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CutError(ValueError):
    """A cut set that cannot be turned into separate subcircuits."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = 2 if kind in TWO_QUBIT else 1
        if len(self.qubits) != arity:
            raise CircuitError(f"{kind} acts on {arity} qubit(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{kind} qubits must be distinct: {self.qubits}")
        if (kind in ROTATIONS) != (self.angle is not None):
            raise CircuitError(f"angle must be given iff the gate is a rotation ({kind})")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def arity(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class CutMarker:
    wire: int
    after_gate: int


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()
    cuts: tuple[CutMarker, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "cuts", tuple(self.cuts))
        if self.width < 1:
            raise CircuitError("circuit needs at least one qubit")
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.width:
                    raise CircuitError(f"qubit index {q} out of range for width {self.width}")
        seen = set()
        for cut in self.cuts:
            if not 0 <= cut.after_gate < len(self.gates):
                raise CircuitError(f"cut references missing gate {cut.after_gate}")
            if cut.wire not in self.gates[cut.after_gate].qubits:
                raise CircuitError(
                    f"cut on wire {cut.wire} after gate {cut.after_gate}, "
                    "which does not act on that wire"
                )
            if cut in seen:
                raise CircuitError(f"duplicate cut on wire {cut.wire} after gate {cut.after_gate}")
            seen.add(cut)

    def without_cuts(self) -> Circuit:
        return Circuit(self.width, self.gates)

    def with_cuts(self, cuts) -> Circuit:
        return Circuit(self.width, self.gates, tuple(cuts))


# ---------------------------------------------------------------------------
# text format


def _parse_int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise CircuitError(f"expected integer {what}, got {token!r}", line) from None


def parse_circuit(text: str) -> Circuit:
    """Parse the line format: ``qubits m``, ``<gate> q.. [angle]``, ``cut w after g``."""
    width = None
    gates: list[Gate] = []
    cuts: list[tuple[CutMarker, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()
        if width is None:
            if head != "qubits" or len(tokens) != 2:
                raise CircuitError("first statement must be 'qubits <m>'", lineno)
            width = _parse_int(tokens[1], "qubit count", lineno)
            if width < 1:
                raise CircuitError("qubit count must be positive", lineno)
            continue
        if head == "qubits":
            raise CircuitError("'qubits' may appear only once", lineno)
        if head == "cut":
            if len(tokens) != 4 or tokens[2].lower() != "after":
                raise CircuitError("expected 'cut <wire> after <gate-index>'", lineno)
            wire = _parse_int(tokens[1], "wire", lineno)
            after = _parse_int(tokens[3], "gate index", lineno)
            if not 0 <= wire < width:
                raise CircuitError(f"qubit index {wire} out of range for width {width}", lineno)
            marker = CutMarker(wire, after)
            if marker in (c for c, _ in cuts):
                raise CircuitError(f"duplicate cut on wire {wire} after gate {after}", lineno)
            cuts.append((marker, lineno))
            continue
        kind = head.upper()
        if kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {tokens[0]!r}", lineno)
        arity = 2 if kind in TWO_QUBIT else 1
        n_args = arity + (1 if kind in ROTATIONS else 0)
        if len(tokens) - 1 != n_args:
            raise CircuitError(f"{kind} expects {n_args} argument(s)", lineno)
        qubits = tuple(_parse_int(t, "qubit", lineno) for t in tokens[1 : 1 + arity])
        for q in qubits:
            if not 0 <= q < width:
                raise CircuitError(f"qubit index {q} out of range for width {width}", lineno)
        angle = None
        if kind in ROTATIONS:
            try:
                angle = float(tokens[-1])
            except ValueError:
                raise CircuitError(f"bad angle {tokens[-1]!r}", lineno) from None
            if not math.isfinite(angle):
                raise CircuitError("angle must be finite", lineno)
        try:
            gates.append(Gate(kind, qubits, angle))
        except CircuitError as exc:
            raise CircuitError(str(exc), lineno) from None
    if width is None:
        raise CircuitError("missing 'qubits <m>' statement")
    # cut lines may name gates defined further down
    for marker, lineno in cuts:
        if not 0 <= marker.after_gate < len(gates):
            raise CircuitError(f"cut references missing gate {marker.after_gate}", lineno)
        if marker.wire not in gates[marker.after_gate].qubits:
            raise CircuitError(f"gate {marker.after_gate} does not act on wire {marker.wire}", lineno)
    return Circuit(width, tuple(gates), tuple(c for c, _ in cuts))


def render_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.width}"]
    for gate in circuit.gates:
        parts = [gate.kind.lower(), *map(str, gate.qubits)]
        if gate.angle is not None:
            parts.append(repr(gate.angle))
        lines.append(" ".join(parts))
    for cut in circuit.cuts:
        lines.append(f"cut {cut.wire} after {cut.after_gate}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# graph view


def source_node(wire: int) -> tuple[str, int]:
    return ("q", wire)


def gate_node(index: int) -> tuple[str, int]:
    return ("g", index)


@dataclass(frozen=True)
class CircuitDag:
    """Wire graph of a circuit.

    ``graph`` is a ``networkx.MultiDiGraph``; nodes are ``("q", wire)`` for the
    initial qubits and ``("g", index)`` for gates, every edge carries its
    ``wire``. Two gates sharing two wires are joined by two parallel edges.
    """

    circuit: Circuit
    graph: nx.MultiDiGraph = field(compare=False)

    def segment_edge(self, wire: int, after_gate: int):
        """The ``(tail, head, key)`` edge for the segment leaving ``after_gate`` on ``wire``."""
        tail = gate_node(after_gate)
        for _, head, key, data in self.graph.out_edges(tail, keys=True, data=True):
            if data["wire"] == wire:
                return tail, head, key
        return None


def build_dag(circuit: Circuit) -> CircuitDag:
    graph = nx.MultiDiGraph()
    last = {}
    for wire in range(circuit.width):
        node = source_node(wire)
        graph.add_node(node, kind="source", wire=wire)
        last[wire] = node
    for index, gate in enumerate(circuit.gates):
        node = gate_node(index)
        graph.add_node(node, kind="gate", gate=gate)
        for wire in gate.qubits:
            graph.add_edge(last[wire], node, wire=wire)
            last[wire] = node
    return CircuitDag(circuit, graph)


# ---------------------------------------------------------------------------
# partitioning


@dataclass(frozen=True)
class WireSegment:
    """One local qubit of a subcircuit: a stretch of an original wire between cuts.

    ``init_cut`` is the cut whose downstream terminal prepares this qubit
    (``None``: starts in |0>). ``meas_cut`` is the cut whose upstream terminal
    measures it (``None``: the measurement is a circuit output bit).
    """

    wire: int
    piece: int
    init_cut: int | None
    meas_cut: int | None


@dataclass(frozen=True)
class Subcircuit:
    index: int
    segments: tuple[WireSegment, ...]
    gates: tuple[Gate, ...]
    gate_indices: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.segments)

    @property
    def output_wires(self) -> tuple[int, ...]:
        return tuple(s.wire for s in self.segments if s.meas_cut is None)

    @property
    def upstream_cuts(self) -> tuple[int, ...]:
        return tuple(sorted(s.meas_cut for s in self.segments if s.meas_cut is not None))

    @property
    def downstream_cuts(self) -> tuple[int, ...]:
        return tuple(sorted(s.init_cut for s in self.segments if s.init_cut is not None))

    @property
    def terminals(self) -> tuple[tuple[str, int], ...]:
        """Cut terminals in cut order: ``("a", k)`` upstream, ``("e", k)`` downstream."""
        terms = [("a", k) for k in self.upstream_cuts] + [("e", k) for k in self.downstream_cuts]
        return tuple(sorted(terms, key=lambda t: (t[1], t[0])))

    @property
    def rank(self) -> int:
        return 1 + 2 * len(self.terminals)


@dataclass(frozen=True)
class Partition:
    circuit: Circuit
    subcircuits: tuple[Subcircuit, ...]
    # per cut: (upstream subcircuit index, downstream subcircuit index)
    cut_roles: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return self.circuit.width


def _wire_pieces(circuit: Circuit, cut_edges: dict[tuple[int, int], int]):
    """Yield ``(wire, piece, start_node, init_cut, meas_cut, gate_indices)`` per wire piece."""
    on_wire = {w: [] for w in range(circuit.width)}
    for index, gate in enumerate(circuit.gates):
        for w in gate.qubits:
            on_wire[w].append(index)
    for wire, indices in on_wire.items():
        piece, start, init_cut, members = 0, source_node(wire), None, []
        for index in indices:
            members.append(index)
            cut = cut_edges.get((wire, index))
            if cut is not None:
                yield wire, piece, start, init_cut, cut, members
                piece += 1
                init_cut, members = cut, []
                start = None  # head gate of the cut edge, filled by the next gate
        if start is None and not members:
            raise CutError(f"cut on wire {wire} sits on the final segment; nothing downstream")
        yield wire, piece, start, init_cut, None, members


def validate_cut_set(dag: CircuitDag, cuts=None) -> Partition:
    """Remove the cut edges and split the circuit into subcircuits.

    Each cut must separate two distinct connected components: one upstream
    (tail side) and one downstream (head side). Qubits of each subcircuit are
    renumbered contiguously in ascending ``(wire, piece)`` order.
    """
    circuit = dag.circuit
    cuts = tuple(circuit.cuts if cuts is None else cuts)
    if not cuts:
        raise CutError("no cuts given")
    graph = dag.graph.copy()
    cut_edges = {}
    heads = []
    for k, cut in enumerate(cuts):
        if (cut.wire, cut.after_gate) in cut_edges:
            raise CutError(f"duplicate cut on wire {cut.wire} after gate {cut.after_gate}")
        edge = dag.segment_edge(cut.wire, cut.after_gate)
        if edge is None:
            raise CutError(
                f"cut on wire {cut.wire} after gate {cut.after_gate} does not map to a "
                "wire segment between two gates"
            )
        graph.remove_edge(*edge)
        cut_edges[(cut.wire, cut.after_gate)] = k
        heads.append(edge)

    component_of = {}
    for label, nodes in enumerate(nx.weakly_connected_components(graph)):
        for node in nodes:
            component_of[node] = label
    roles = []
    for k, (tail, head, _) in enumerate(heads):
        up, down = component_of[tail], component_of[head]
        if up == down:
            raise CutError(
                f"cut {k} (wire {cuts[k].wire} after gate {cuts[k].after_gate}) does not "
                "disconnect the circuit"
            )
        roles.append((up, down))

    segments: dict[int, list[WireSegment]] = {}
    members: dict[int, set[int]] = {}
    piece_of = {}
    for wire, piece, start, init_cut, meas_cut, indices in _wire_pieces(circuit, cut_edges):
        if start is None:
            start = gate_node(indices[0])
        label = component_of[start]
        segments.setdefault(label, []).append(WireSegment(wire, piece, init_cut, meas_cut))
        members.setdefault(label, set()).update(indices)
        for index in indices:
            piece_of[(wire, index)] = piece

    # order components by their earliest gate (sources-only components last)
    def first_gate(label):
        return min(members[label], default=len(circuit.gates) + min(s.wire for s in segments[label]))

    order = sorted(segments, key=first_gate)
    relabel = {old: new for new, old in enumerate(order)}
    subcircuits = []
    for new, old in enumerate(order):
        segs = tuple(sorted(segments[old], key=lambda s: (s.wire, s.piece)))
        local = {(seg.wire, seg.piece): q for q, seg in enumerate(segs)}
        gate_indices = tuple(sorted(members[old]))
        local_gates = []
        for index in gate_indices:
            gate = circuit.gates[index]
            qubits = tuple(local[(w, piece_of[(w, index)])] for w in gate.qubits)
            local_gates.append(Gate(gate.kind, qubits, gate.angle))
        subcircuits.append(Subcircuit(new, segs, tuple(local_gates), gate_indices))
    cut_roles = tuple((relabel[u], relabel[d]) for u, d in roles)
    return Partition(circuit, tuple(subcircuits), cut_roles)


def partition_circuit(circuit: Circuit) -> Partition:
    return validate_cut_set(build_dag(circuit), circuit.cuts)
