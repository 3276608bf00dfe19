"""Regret-guided local search for the TSP.

An exact per-edge regret oracle (dynamic programming at desk scale) and a
guided local search metaheuristic that uses regret, or plain edge weight,
to steer penalties.  A benchmark harness measures the solution-quality /
computation-time trade-off against exact references.
"""

from regretgls.instance import Instance, generate_random, parse_tsplib
from regretgls.tour import Tour, tour_cost
from regretgls.regret import (
    RegretMatrix,
    exact_optimum,
    fixed_edge_optimum,
    load_regret,
    regret_matrix,
    save_regret,
)
from regretgls.gls import ConvergenceTrace, SolveParams, guided_local_search

__all__ = [
    "Instance",
    "generate_random",
    "parse_tsplib",
    "Tour",
    "tour_cost",
    "RegretMatrix",
    "exact_optimum",
    "fixed_edge_optimum",
    "load_regret",
    "regret_matrix",
    "save_regret",
    "ConvergenceTrace",
    "SolveParams",
    "guided_local_search",
]
