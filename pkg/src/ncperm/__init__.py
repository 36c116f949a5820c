"""Exact non-commutative polynomial tools for Cayley permanents and determinants.

Submodules: ``core`` (free algebra, rational matrices), ``abp`` (branching
programs), ``circuit`` (coefficient algorithms), ``graph`` (cycle covers and
the bounded-component ABP), ``nisan`` (rank lower bounds), ``gentry``
(#SAT through block barber pole matrices), ``sym`` (symmetric families) and
``cli``.
"""

from .abp import Abp, eval_abp, exp_sum_readonce, expand_abp, hadamard_abp
from .circuit import Circuit, CircuitBuilder, expand_circuit, mcoeff, pc_circuit, pcoeff_circuit
from .core import NcPoly, RatMatrix, mat_rank, var
from .gentry import Cnf, count_sat, naive_count, parse_dimacs
from .graph import Involution, LabeledDigraph, build_cperm_abp, cperm_brute, cut, near
from .nisan import abp_complexity, nisan_matrix, nisan_ranks
from .sym import gen_sym, perm_via_hadamard, rank_one_cperm

__version__ = "0.1.0"

__all__ = [
    "Abp", "eval_abp", "exp_sum_readonce", "expand_abp", "hadamard_abp",
    "Circuit", "CircuitBuilder", "expand_circuit", "mcoeff", "pc_circuit", "pcoeff_circuit",
    "NcPoly", "RatMatrix", "mat_rank", "var",
    "Cnf", "count_sat", "naive_count", "parse_dimacs",
    "Involution", "LabeledDigraph", "build_cperm_abp", "cperm_brute", "cut", "near",
    "abp_complexity", "nisan_matrix", "nisan_ranks",
    "gen_sym", "perm_via_hadamard", "rank_one_cperm",
]
