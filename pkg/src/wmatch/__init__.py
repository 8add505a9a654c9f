"""Weighted matching toolkit.

Solvers for maximum weight perfect matching, b-matching and f-factors on
multigraphs, built around a common blossom machinery.  Every solve can emit
an LP dual certificate that is checkable without trusting the solver.  On
top of the f-factor engine sit reductions for degree-bounded subgraphs,
minimum T-joins and single-source shortest paths in conservative undirected
graphs.
"""

from .multigraph import Multigraph, DegreeFn, parse_instance, serialize_instance
from .b_engine import solve_b_matching
from .f_engine import solve_f_factor
from .certify import verify_certificate, brute_force, eval_min_max

__all__ = [
    "Multigraph",
    "DegreeFn",
    "parse_instance",
    "serialize_instance",
    "solve_b_matching",
    "solve_f_factor",
    "verify_certificate",
    "brute_force",
    "eval_min_max",
]
