"""
Cutting a circuit
=================

A circuit is a list of gates over numbered wires. Marking a wire segment with
``cut`` splits the wire graph into pieces that can be simulated on their own.
"""
import networkx as nx

from cutrecon import Circuit, build_dag, parse_circuit, partition_circuit, render_circuit

source = """
qubits 3
h 0
cx 0 1
cx 1 2
# cut wire 1 right after the first CX touches it
cut 1 after 1
"""
circuit = parse_circuit(source)
print(render_circuit(circuit))

# Gates are vertices, wire segments are edges. One source vertex per qubit.
dag = build_dag(circuit)
print(dag.graph.number_of_nodes(), "vertices,", dag.graph.number_of_edges(), "edges")
for u, v, data in dag.graph.edges(data=True):
    print(f"  {u} -> {v}  (wire {data['wire']})")

# Removing the cut edge leaves two weakly connected components.
g = dag.graph.copy()
u, v, key = dag.segment_edge(1, 1)
g.remove_edge(u, v, key)
print("components after removing the cut:", nx.number_weakly_connected_components(g))

partition = partition_circuit(circuit)
for sub in partition.subcircuits:
    print(f"subcircuit {sub.index}: gates {sub.gate_indices}, outputs {sub.output_wires}, "
          f"terminals {sub.terminals}, tensor rank {sub.rank}")

# The upstream piece measures the cut wire, the downstream piece prepares it.
# Each runs on its own, renumbered qubits.
for sub in partition.subcircuits:
    roles = [("measured" if seg.meas_cut is not None else "prepared" if seg.init_cut is not None else "plain")
             for seg in sub.segments]
    print(f"subcircuit {sub.index} local qubits:", list(zip([s.wire for s in sub.segments], roles)))
    print(render_circuit(Circuit(sub.width, sub.gates)))
