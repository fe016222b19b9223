"""
Subcircuit tensors and single-string queries
============================================

Every subcircuit is simulated once per measurement basis of its upstream cut
wires and once per prepared eigenstate of its downstream cut wires. The
results form a table indexed by (output bits, bit, basis) per cut.
"""
import numpy as np

from cutrecon import GAMMA, JoinPlan, PauliBasis, build_tensors, parse_circuit, partition_circuit, query_joint

bell = parse_circuit("""
qubits 2
h 0
cut 0 after 0
cx 0 1
""")
up, down = build_tensors(partition_circuit(bell))
print("upstream", up.labels, up.values.shape)
print("downstream", down.labels, down.values.shape)

# H|0> is the +1 eigenstate of X, so measuring it in X always gives bit 0,
# while Y and Z are fair coins.
for basis in PauliBasis:
    print(f"  upstream measured in {basis.name}: P(a=0), P(a=1) =", up.values[0, :, basis])

# The coefficient table that glues a measured bit a to a prepared eigenstate e.
for basis in PauliBasis:
    print(f"gamma[:, :, {basis.name}] =\n{GAMMA[:, :, basis].astype(int)}")

# One output string costs 12 products per cut, whatever the circuit width.
plan = JoinPlan.from_tensors([up, down])
for bits in ("00", "01", "10", "11"):
    print(bits, round(query_joint(bits, plan, [up, down]), 12))

# Shot-sampled tables replace each variant's distribution by a multinomial estimate.
noisy = build_tensors(partition_circuit(bell), shots=1000, seed=7)
print("max |shots - exact| in the downstream table:", np.abs(noisy[1].values - down.values).max())
