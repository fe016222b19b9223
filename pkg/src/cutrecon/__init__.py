"""Circuit cutting with exact and Metropolis-Hastings reconstruction."""
from .circuit import Circuit, CutMarker, Gate, build_dag, parse_circuit, partition_circuit, render_circuit, validate_cut_set
from .metrics import DistanceReport, avg_variational_distance
from .reconstruct_exact import join_pair_exact, reconstruct_exact, reconstruct_exact_one_cut
from .reconstruct_mcmc import MhConfig, mh_one_cut, mh_reconstruct, mh_two_cut_full, mh_two_cut_randomized
from .simulator import PauliBasis, SubcircuitTensor, born_probabilities, build_subcircuit_tensor, build_tensors, run_variant
from .tensors import GAMMA, JoinPlan, QuasiDistribution, gamma, negativity_report, query_joint

__version__ = "0.1.0"
