"""
Exact reconstruction
====================

Contracting every cut recovers the uncut output distribution. With exact
tables the result matches a direct simulation; with sampled tables it is a
quasi-distribution that can dip below zero.
"""
import numpy as np

from cutrecon import born_probabilities, build_tensors, join_pair_exact, partition_circuit, reconstruct_exact
from cutrecon.harness import cascade_circuit
from cutrecon.reconstruct_exact import reconstruct_from_queries, to_distribution

rng = np.random.default_rng(3)
circuit = cascade_circuit([3, 4, 3], depth=3, rng=rng)
print(f"{circuit.width} qubits, {len(circuit.gates)} gates, cuts at {[(m.wire, m.after_gate) for m in circuit.cuts]}")

tensors = build_tensors(partition_circuit(circuit))
print("tensor ranks:", [t.rank for t in tensors])
oracle = born_probabilities(circuit.without_cuts())

# Per-string queries over all 2^m strings, and pairwise joins, agree with the oracle.
by_query = reconstruct_from_queries(tensors).dense()
print("queries vs oracle:", np.abs(by_query - oracle).max())

a, b, c = tensors
ab = join_pair_exact(a, b, 0)
print("after joining A and B the tensor has labels", ab.labels)
left = to_distribution(join_pair_exact(ab, c, 1), circuit.width).dense()
right = reconstruct_exact(tensors, order=[1, 0]).dense()
print("(AB)C vs A(BC):", np.abs(left - right).max())

# Sampled tables: negative entries appear, the raw sum stays at one.
noisy = reconstruct_exact(build_tensors(partition_circuit(circuit), shots=500, seed=1))
print("negativity report:", noisy.report)
clean = noisy.normalize()
print("after clamping and rescaling: min", clean.dense().min(), "sum", clean.total())
