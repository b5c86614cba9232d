"""ADAPT-Clifford MaxCut toolkit."""
from .graph import Graph, WeightSpec, gen_complete, gen_erdos_renyi, gen_regular, gen_sk, total_weight
from .cut_energy import CutAssignment, approx_ratio, cut_value, ising_energy, sk_energy
from .solution import Solution
from .adapt import deterministic, randomized, run_from

__version__ = "0.1.0"
