import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutrecon.circuit import Circuit, Gate, parse_circuit, partition_circuit
from cutrecon.simulator import (
    EIGENSTATES,
    MAX_QUBITS,
    CutVariantAssignment,
    PauliBasis,
    apply_gate,
    born_probabilities,
    build_subcircuit_tensor,
    gate_matrix,
    run_variant,
    simulate,
)
from conftest import random_cascade
from oracles import dense_born, single

PAULI = {
    PauliBasis.X: np.array([[0, 1], [1, 0]]),
    PauliBasis.Y: np.array([[0, -1j], [1j, 0]]),
    PauliBasis.Z: np.array([[1, 0], [0, -1]]),
}


def test_basis_order():
    assert [b.name for b in PauliBasis] == ["X", "Y", "Z"]
    assert PauliBasis.X < PauliBasis.Y < PauliBasis.Z


@pytest.mark.parametrize("basis", list(PauliBasis))
def test_eigenstates(basis):
    for bit, sign in ((0, 1), (1, -1)):
        v = EIGENSTATES[basis][bit]
        assert np.allclose(PAULI[basis] @ v, sign * v)
        assert np.isclose(np.vdot(v, v), 1)


@pytest.mark.parametrize("kind", ["H", "X", "Y", "Z", "S", "T"])
def test_fixed_gates_match_oracle(kind):
    assert np.allclose(gate_matrix(Gate(kind, (0,))), single(kind))


@pytest.mark.parametrize("kind", ["RX", "RY", "RZ"])
@pytest.mark.parametrize("angle", [0.0, 0.3, np.pi, -2.1])
def test_rotations_match_oracle(kind, angle):
    m = gate_matrix(Gate(kind, (0,), angle))
    # equal up to global phase
    ref = single(kind, angle)
    phase = np.vdot(ref.ravel(), m.ravel())
    assert np.isclose(abs(phase), 2)
    assert np.allclose(m, ref * phase / abs(phase))


def test_little_endian():
    psi = simulate([Gate("X", (0,))], 3)
    assert np.flatnonzero(np.abs(psi) > 0.5).tolist() == [1]
    psi = simulate([Gate("X", (2,))], 3)
    assert np.flatnonzero(np.abs(psi) > 0.5).tolist() == [4]


def test_cx_control_is_first_qubit():
    psi = simulate([Gate("X", (1,)), Gate("CX", (1, 0))], 2)
    assert np.isclose(abs(psi[3]), 1)
    psi = simulate([Gate("X", (0,)), Gate("CX", (1, 0))], 2)
    assert np.isclose(abs(psi[1]), 1)


def _random_circuit(rng, n, depth):
    gates = []
    for _ in range(depth):
        for q in range(n):
            k = rng.choice(["H", "X", "Y", "Z", "S", "T", "RX", "RY", "RZ"])
            gates.append(Gate(k, (q,), float(rng.uniform(0, 6.3)) if k.startswith("R") else None))
        if n > 1:
            for _ in range(n // 2):
                a, b = rng.choice(n, 2, replace=False)
                gates.append(Gate(str(rng.choice(["CX", "CZ"])), (int(a), int(b))))
    return Circuit(n, tuple(gates))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 10])
def test_born_matches_dense_oracle(n):
    rng = np.random.default_rng(n)
    c = _random_circuit(rng, n, 3)
    assert np.allclose(born_probabilities(c), dense_born(c), atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_norm_preserved_after_every_gate(seed, n):
    rng = np.random.default_rng(seed)
    c = _random_circuit(rng, n, 3)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for g in c.gates:
        psi = apply_gate(psi, g, n)
        assert abs(np.vdot(psi, psi) - 1) < 1e-12


def test_width_guard():
    with pytest.raises(ValueError, match="refusing"):
        simulate([], MAX_QUBITS + 1)


def test_bell_upstream_variants(bell):
    up, down = partition_circuit(bell).subcircuits
    # H|0> = |+>: X basis gives a = 0 always, Y and Z are fair coins
    assert np.allclose(run_variant(up, CutVariantAssignment(measure={0: PauliBasis.X})), [[1, 0]])
    assert np.allclose(run_variant(up, CutVariantAssignment(measure={0: PauliBasis.Y})), [[0.5, 0.5]])
    assert np.allclose(run_variant(up, CutVariantAssignment(measure={0: PauliBasis.Z})), [[0.5, 0.5]])


def test_bell_downstream_variants(bell):
    _, down = partition_circuit(bell).subcircuits
    # prepare |1> then CX -> |11>, string index 3
    out = run_variant(down, CutVariantAssignment(prepare={0: (PauliBasis.Z, 1)}))
    assert np.allclose(out, [0, 0, 0, 1])
    out = run_variant(down, CutVariantAssignment(prepare={0: (PauliBasis.X, 0)}))
    assert np.allclose(out, [0.5, 0, 0, 0.5])


def test_variant_assignment_must_cover_cuts(bell):
    up, _ = partition_circuit(bell).subcircuits
    with pytest.raises(ValueError, match="cover"):
        run_variant(up, CutVariantAssignment())


def test_tensor_layout(ghz_cascade):
    a, b, c = [build_subcircuit_tensor(s) for s in partition_circuit(ghz_cascade).subcircuits]
    assert a.values.shape == (1, 2, 3)
    assert b.values.shape == (2, 2, 3, 2, 3)
    assert c.values.shape == (4, 2, 3)
    assert b.labels == ("bits", "e1", "beta1", "a2", "beta2")
    assert a.labels == ("bits", "a1", "beta1")


@pytest.mark.parametrize("seed", range(5))
def test_tensor_slices_are_distributions(seed):
    c = random_cascade([3, 3, 3], seed)
    for sub in partition_circuit(c).subcircuits:
        t = build_subcircuit_tensor(sub)
        assert np.all(t.values >= -1e-15)
        # sum over output bits and upstream connection bits is 1 for each variant
        axes = (0,) + tuple(1 + 2 * i for i, (r, _) in enumerate(t.terminals) if r == "a")
        total = t.values.sum(axis=axes)
        assert np.allclose(total, 1)


def test_z_basis_consistency():
    # measuring the cut wire in Z equals the uncut marginal of that wire with the rest
    c = random_cascade([3, 3], seed=11)
    up = partition_circuit(c).subcircuits[0]
    t = build_subcircuit_tensor(up)
    born = born_probabilities(Circuit(3, tuple(c.gates[i] for i in up.gate_indices)))
    # up outputs wires 0, 1; connection bit is wire 2
    expected = born.reshape(2, 4).T  # [bits01, wire2]
    assert np.allclose(t.values[:, :, 2], expected)


def test_shots_deterministic_and_close():
    c = random_cascade([3, 3], seed=2)
    sub = partition_circuit(c).subcircuits[1]
    exact = build_subcircuit_tensor(sub)
    s1 = build_subcircuit_tensor(sub, shots=10**6, seed=5)
    s2 = build_subcircuit_tensor(sub, shots=10**6, seed=5)
    s3 = build_subcircuit_tensor(sub, shots=10**6, seed=6)
    assert np.array_equal(s1.values, s2.values)
    assert not np.array_equal(s1.values, s3.values)
    assert np.max(np.abs(s1.values - exact.values)) < 5e-3
    assert s1.mode == "shots" and s1.shots == 10**6 and exact.mode == "exact"


def test_deterministic_circuit_tensor():
    c = parse_circuit("qubits 2\nx 1\ncut 1 after 0\ncx 1 0\n")
    a, b = [build_subcircuit_tensor(s) for s in partition_circuit(c).subcircuits]
    # upstream measures wire 1 in Z: connection bit 1 always
    assert np.allclose(a.values[0, :, 2], [0, 1])
    # downstream prepared in |1> outputs "11"
    assert np.allclose(b.values[:, 1, 2], [0, 0, 0, 1])
