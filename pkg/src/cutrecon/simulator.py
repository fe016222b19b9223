"""Statevector simulation of subcircuits and construction of their outcome tensors.

Amplitude index bit ``k`` is qubit ``k`` (little-endian). A subcircuit touching
``k`` cuts is stored as a rank ``2k+1`` array: one axis over its output bit
strings, then for every cut terminal (in cut order) a bit axis (connection bit
``a`` upstream, eigenvalue bit ``e`` downstream) and a basis axis (X, Y, Z).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate, Subcircuit

MAX_QUBITS = 20

_S2 = 1 / np.sqrt(2)
_FIXED = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
}
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)

# two-qubit matrices in the basis |q0 q1>, q0 = first listed qubit (control)
_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    kind = gate.kind
    if kind in _FIXED:
        return _FIXED[kind]
    if kind == "CX":
        return _CX
    if kind == "CZ":
        return _CZ
    c, s = np.cos(gate.angle / 2), np.sin(gate.angle / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[np.exp(-0.5j * gate.angle), 0], [0, np.exp(0.5j * gate.angle)]])
    raise ValueError(f"no matrix for gate {kind}")


class PauliBasis(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2


# single-qubit eigenstates indexed [basis][bit]; bit 0 is the +1 eigenvalue
EIGENSTATES = {
    PauliBasis.X: (np.array([1, 1]) * _S2, np.array([1, -1]) * _S2),
    PauliBasis.Y: (np.array([1, 1j]) * _S2, np.array([1, -1j]) * _S2),
    PauliBasis.Z: (np.array([1, 0]), np.array([0, 1])),
}
# rotation taking the basis' +1 eigenstate to |0>: X via H, Y via S-dagger then H
_TO_COMPUTATIONAL = {
    PauliBasis.X: _FIXED["H"],
    PauliBasis.Y: _FIXED["H"] @ _SDG,
    PauliBasis.Z: None,
}


def apply_matrix(state: np.ndarray, matrix: np.ndarray, qubits, n: int) -> np.ndarray:
    """Apply a 1- or 2-qubit ``matrix`` to ``state`` on ``qubits`` (first listed = most significant in ``matrix``)."""
    k = len(qubits)
    psi = state.reshape((2,) * n)
    axes = [n - 1 - q for q in qubits]
    op = matrix.reshape((2,) * (2 * k))
    psi = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    psi = np.moveaxis(psi, list(range(k)), axes)
    return psi.reshape(-1)


def apply_gate(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    return apply_matrix(state, gate_matrix(gate), gate.qubits, n)


def product_state(qubit_states) -> np.ndarray:
    """Tensor product of single-qubit states, ``qubit_states[k]`` for qubit ``k``."""
    psi = np.ones(1, dtype=complex)
    for v in qubit_states:
        psi = np.kron(np.asarray(v, dtype=complex), psi)
    return psi


def simulate(gates, n: int, initial: np.ndarray | None = None) -> np.ndarray:
    if n > MAX_QUBITS:
        raise ValueError(f"refusing to simulate {n} qubits (limit {MAX_QUBITS})")
    if initial is None:
        initial = np.zeros(2**n, dtype=complex)
        initial[0] = 1.0
    psi = initial
    for gate in gates:
        psi = apply_gate(psi, gate, n)
    return psi


def born_probabilities(circuit: Circuit) -> np.ndarray:
    """Exact output distribution of an uncut circuit, index bit ``k`` = qubit ``k``."""
    psi = simulate(circuit.gates, circuit.width)
    return np.abs(psi) ** 2


@dataclass(frozen=True)
class CutVariantAssignment:
    """Basis per upstream terminal and ``(basis, eigenvalue bit)`` per downstream terminal, keyed by cut."""

    measure: dict = field(default_factory=dict)
    prepare: dict = field(default_factory=dict)


def _check_assignment(sub: Subcircuit, assign: CutVariantAssignment):
    up, down = set(sub.upstream_cuts), set(sub.downstream_cuts)
    if set(assign.measure) != up:
        raise ValueError(f"measurement bases must cover upstream cuts {sorted(up)}, got {sorted(assign.measure)}")
    if set(assign.prepare) != down:
        raise ValueError(f"preparations must cover downstream cuts {sorted(down)}, got {sorted(assign.prepare)}")


def _initial_state(sub: Subcircuit, prepare) -> np.ndarray:
    states = []
    for seg in sub.segments:
        if seg.init_cut is None:
            states.append(EIGENSTATES[PauliBasis.Z][0])
        else:
            basis, bit = prepare[seg.init_cut]
            states.append(EIGENSTATES[PauliBasis(basis)][int(bit)])
    return product_state(states)


def _measure(sub: Subcircuit, psi: np.ndarray, measure) -> np.ndarray:
    n = sub.width
    meas_qubit = {}
    for q, seg in enumerate(sub.segments):
        if seg.meas_cut is not None:
            meas_qubit[seg.meas_cut] = q
            rot = _TO_COMPUTATIONAL[PauliBasis(measure[seg.meas_cut])]
            if rot is not None:
                psi = apply_matrix(psi, rot, (q,), n)
    probs = (np.abs(psi) ** 2).reshape((2,) * n)
    outputs = [q for q, seg in enumerate(sub.segments) if seg.meas_cut is None]
    upstream = [meas_qubit[k] for k in sub.upstream_cuts]
    order = [n - 1 - q for q in reversed(outputs)] + [n - 1 - q for q in upstream]
    probs = probs.transpose(order) if n else probs
    return probs.reshape((2 ** len(outputs),) + (2,) * len(upstream))


def run_variant(sub: Subcircuit, assign: CutVariantAssignment) -> np.ndarray:
    """Born probabilities of one measurement/preparation variant.

    Returns an array of shape ``(2**n_outputs,) + (2,) * n_upstream``; the
    trailing axes are the connection bits in cut order.
    """
    _check_assignment(sub, assign)
    if sub.width > MAX_QUBITS:
        raise ValueError(f"refusing to simulate {sub.width} qubits (limit {MAX_QUBITS})")
    psi = simulate(sub.gates, sub.width, _initial_state(sub, assign.prepare))
    return _measure(sub, psi, assign.measure)


@dataclass(frozen=True)
class SubcircuitTensor:
    values: np.ndarray
    output_wires: tuple[int, ...]
    terminals: tuple[tuple[str, int], ...]
    mode: str = "exact"
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self):
        expected = (2 ** len(self.output_wires),) + (2, 3) * len(self.terminals)
        if self.values.shape != expected:
            raise ValueError(f"tensor shape {self.values.shape} does not match layout {expected}")

    @property
    def rank(self) -> int:
        return self.values.ndim

    @property
    def labels(self) -> tuple[str, ...]:
        out = ["bits"]
        for role, cut in self.terminals:
            out += [f"{role}{cut + 1}", f"beta{cut + 1}"]
        return tuple(out)

    def terminal_position(self, role: str, cut: int) -> int:
        return self.terminals.index((role, cut))

    @property
    def cuts(self) -> tuple[int, ...]:
        return tuple(cut for _, cut in self.terminals)


def variants(sub: Subcircuit):
    """All assignments in tensor order: preparations outer, measurement bases inner."""
    preps = list(itertools.product(itertools.product(PauliBasis, (0, 1)), repeat=len(sub.downstream_cuts)))
    bases = list(itertools.product(PauliBasis, repeat=len(sub.upstream_cuts)))
    for prep in preps:
        prepare = dict(zip(sub.downstream_cuts, prep))
        yield prepare, [dict(zip(sub.upstream_cuts, b)) for b in bases]


def build_subcircuit_tensor(sub: Subcircuit, shots: int | None = None, seed: int = 0) -> SubcircuitTensor:
    """Tabulate every variant of ``sub``; ``shots=None`` gives exact probabilities.

    In shot mode each variant's distribution is replaced by a multinomial
    sample of ``shots`` draws divided by ``shots``; variant ``v`` draws from
    its own stream spawned from ``seed``.
    """
    if sub.width > MAX_QUBITS:
        raise ValueError(f"refusing to simulate {sub.width} qubits (limit {MAX_QUBITS})")
    terminals = sub.terminals
    values = np.zeros((2 ** len(sub.output_wires),) + (2, 3) * len(terminals))
    v = 0
    for prepare, measures in variants(sub):
        psi = simulate(sub.gates, sub.width, _initial_state(sub, prepare))
        for measure in measures:
            probs = _measure(sub, psi, measure)
            if shots is not None:
                rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(v,)))
                p = np.clip(probs.ravel(), 0, None)
                probs = (rng.multinomial(shots, p / p.sum()) / shots).reshape(probs.shape)
            index = [slice(None)]
            for role, cut in terminals:
                if role == "e":
                    basis, bit = prepare[cut]
                    index += [int(bit), int(basis)]
                else:
                    index += [slice(None), int(measure[cut])]
            values[tuple(index)] = probs
            v += 1
    return SubcircuitTensor(
        values,
        sub.output_wires,
        terminals,
        mode="exact" if shots is None else "shots",
        shots=shots,
        seed=None if shots is None else seed,
    )


def build_tensors(partition, shots: int | None = None, seed: int = 0) -> list[SubcircuitTensor]:
    """Tensors for every subcircuit of a partition; subcircuit ``i`` uses a seed spawned from ``seed``."""
    out = []
    for sub in partition.subcircuits:
        sub_seed = int(np.random.SeedSequence(seed, spawn_key=(sub.index,)).generate_state(1)[0])
        out.append(build_subcircuit_tensor(sub, shots=shots, seed=sub_seed))
    return out
