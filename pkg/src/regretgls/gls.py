"""Guided local search: penalty-driven escape from local optima.

The solver alternates two phases until its deadline.  The optimization
phase is plain best-improvement search on tour cost g.  The perturbation
phase penalizes the current solution's highest-utility edges, where

    utility(e) = guide_cost(e) / (1 + penalties(e))   for tour edges,

and then searches under the augmented cost

    h = g + lambda * (sum of penalties of edges in the tour),

restricted to moves that remove a penalized edge, until K augmented-cost
improvements have been applied.  The guide cost is either the edge
weight (classical) or an edge-regret value, so high-regret edges are
targeted for removal first.

Best-so-far is always measured under g and never regresses; a
convergence trace records every improvement with its elapsed time.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple, Union

import numpy as np

from .construct import nearest_neighbor, regret_greedy
from .instance import Instance, distance_matrix
from .regret import RegretMatrix
from .search import Objective, local_search, restricted_local_search
from .tour import Tour

GUIDE_KINDS = ("weight", "regret")

# relative slack for "equal" utilities: tied maxima are penalized together
UTILITY_TIE_REL = 1e-12


@dataclass
class SolveParams:
    k_moves: int = 20
    lambda_alpha: float = 0.1
    time_budget_s: float = 10.0
    guide: str = "weight"
    # penalize every edge tied at the maximum utility (plural aspects);
    # False penalizes only the lexicographically first of the tied set
    penalize_ties: bool = True
    # deterministic phase cap, mainly for reproducibility tests; None = none
    max_phases: Optional[int] = None

    def __post_init__(self):
        if self.k_moves < 1:
            raise ValueError(f"k_moves must be >= 1, got {self.k_moves}")
        # alpha 0 is allowed and degenerates h to g (no escape possible)
        if self.lambda_alpha < 0:
            raise ValueError(f"lambda_alpha must be >= 0, got {self.lambda_alpha}")
        if self.time_budget_s <= 0:
            raise ValueError(f"time_budget_s must be > 0, got {self.time_budget_s}")
        if self.guide not in GUIDE_KINDS:
            raise ValueError(f"guide must be one of {GUIDE_KINDS}, got {self.guide!r}")


@dataclass
class GuidedSearchState:
    penalties: np.ndarray  # (n, n) symmetric int64, >= 0
    lam: float
    guide_costs: np.ndarray  # (n, n) symmetric, >= 0
    moves_in_phase: int = 0


class ConvergenceTrace:
    """Best-cost-so-far samples: strictly increasing times, non-increasing
    costs.  One sample per improvement, plus one final sample at the end
    of the run."""

    __slots__ = ("samples", "tour", "penalized_events")

    def __init__(self):
        self.samples: List[Tuple[float, float]] = []
        self.tour: Optional[Tour] = None
        # one frozenset of (i, j) pairs per penalization event, diagnostics
        self.penalized_events: List[frozenset] = []

    def record(self, elapsed: float, cost: float) -> None:
        if self.samples:
            t_last, c_last = self.samples[-1]
            if elapsed <= t_last:
                elapsed = t_last + 1e-9
            if cost > c_last:
                raise ValueError(f"best cost regressed from {c_last} to {cost}")
        self.samples.append((elapsed, cost))

    def record_final(self, elapsed: float) -> None:
        if not self.samples:
            raise ValueError("cannot finalize an empty trace")
        t_last, c_last = self.samples[-1]
        self.samples.append((max(elapsed, t_last + 1e-9), c_last))

    def best_cost(self) -> float:
        return self.samples[-1][1]


def save_trace(trace: ConvergenceTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("elapsed_s,best_cost\n")
        for t, c in trace.samples:
            f.write(f"{t!r},{c!r}\n")


def load_trace(path) -> List[Tuple[float, float]]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("elapsed_s"):
                continue
            t, c = line.split(",")
            out.append((float(t), float(c)))
    return out


# -----------------------------
# Penalty machinery
# -----------------------------
def compute_lambda(inst: Instance, first_local_opt_cost: float, alpha: float) -> float:
    """Penalty scale in cost units: alpha * g(first local optimum) / n."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return alpha * first_local_opt_cost / inst.n


def augmented_cost(inst: Instance, tour: Tour, state: GuidedSearchState) -> float:
    w = distance_matrix(inst)
    order = tour.order
    succ = np.roll(order, -1)
    g = float(w[order, succ].sum())
    return g + state.lam * float(state.penalties[order, succ].sum())


def utility(state: GuidedSearchState, t_star: Tour) -> np.ndarray:
    """(n, n) utility matrix: guide/(1+p) on the tour's edges, 0 elsewhere."""
    n = state.guide_costs.shape[0]
    util = np.zeros((n, n))
    order = t_star.order
    succ = np.roll(order, -1)
    vals = state.guide_costs[order, succ] / (1.0 + state.penalties[order, succ])
    util[order, succ] = vals
    util[succ, order] = vals
    return util


def penalize(
    state: GuidedSearchState, t_star: Tour, all_ties: bool = True
) -> List[Tuple[int, int]]:
    """Increment penalties on every tour edge attaining the maximum
    utility (ties within relative 1e-12); returns the penalized edges.
    all_ties=False keeps only the lexicographically first tied edge."""
    order = t_star.order
    succ = np.roll(t_star.order, -1)
    vals = state.guide_costs[order, succ] / (1.0 + state.penalties[order, succ])
    vmax = float(vals.max())
    tied = np.flatnonzero(vals >= vmax - UTILITY_TIE_REL * abs(vmax))
    edges = sorted(
        (min(int(order[k]), int(succ[k])), max(int(order[k]), int(succ[k])))
        for k in tied
    )
    if not all_ties:
        edges = edges[:1]
    for i, j in edges:
        state.penalties[i, j] += 1
        state.penalties[j, i] += 1
    return edges


# -----------------------------
# Driver
# -----------------------------
def guided_local_search(
    inst: Instance,
    guide: Union[RegretMatrix, np.ndarray, None],
    params: SolveParams,
    deadline: Optional[float] = None,
    start: int = 0,
    target_cost: Optional[float] = None,
) -> Tuple[Tour, ConvergenceTrace]:
    """Run guided local search until the deadline.

    `guide` supplies the per-edge guide costs for params.guide="regret";
    the weight guide ignores it and uses the distance matrix.  An
    already-passed deadline returns the initial tour.  `target_cost`
    stops the run once the best cost is within 1e-7 of it (used by the
    harness when a proven optimum is known).
    """
    n = inst.n
    w = distance_matrix(inst)
    if params.guide == "regret":
        if guide is None:
            raise ValueError("regret guide selected but no regret matrix given")
        guide_costs = guide.values if isinstance(guide, RegretMatrix) else np.asarray(guide, dtype=np.float64)
        if guide_costs.shape != (n, n):
            raise ValueError(
                f"guide matrix is {guide_costs.shape[0]}x{guide_costs.shape[1]} "
                f"but the instance has n={n} nodes"
            )
        # a learned guide may carry small negatives; utilities need >= 0
        guide_costs = np.clip(guide_costs, 0.0, None)
        t0 = regret_greedy(inst, guide_costs, start=start)
    else:
        guide_costs = w
        t0 = nearest_neighbor(inst, start=start)

    t_start = time.perf_counter()
    if deadline is None:
        deadline = t_start + params.time_budget_s

    obj_g = Objective(w)
    trace = ConvergenceTrace()
    cur_order = np.array(t0.order)
    best_order = cur_order.copy()
    best_cost = obj_g.cost(cur_order)
    trace.record(time.perf_counter() - t_start, best_cost)

    if deadline <= t_start:
        trace.tour = Tour(best_order)
        trace.record_final(time.perf_counter() - t_start)
        return trace.tour, trace

    def note(order: np.ndarray) -> None:
        nonlocal best_cost, best_order
        c = obj_g.cost(order)
        if c < best_cost - 1e-12:
            best_cost = c
            best_order = order.copy()
            trace.record(time.perf_counter() - t_start, c)

    def reached_target() -> bool:
        return target_cost is not None and best_cost <= target_cost + 1e-7

    cur = local_search(inst, Tour(cur_order), obj_g, deadline=deadline, on_move=note)
    cur_order = np.array(cur.order)
    note(cur_order)

    lam = compute_lambda(inst, obj_g.cost(cur_order), params.lambda_alpha)
    state = GuidedSearchState(
        penalties=np.zeros((n, n), dtype=np.int64), lam=lam, guide_costs=guide_costs
    )

    phases = 0
    while time.perf_counter() < deadline and not reached_target():
        if params.max_phases is not None and phases >= params.max_phases:
            break
        # perturbation: penalize and repair until K augmented improvements
        state.moves_in_phase = 0
        while state.moves_in_phase < params.k_moves:
            if time.perf_counter() >= deadline or reached_target():
                break
            edges = penalize(state, Tour(cur_order), all_ties=params.penalize_ties)
            trace.penalized_events.append(frozenset(edges))
            obj_h = Objective(w + state.lam * state.penalties)
            for e in edges:
                t_new, applied = restricted_local_search(inst, Tour(cur_order), e, obj_h)
                if applied:
                    cur_order = np.array(t_new.order)
                    state.moves_in_phase += 1
                    note(cur_order)
                    if state.moves_in_phase >= params.k_moves:
                        break
        if time.perf_counter() >= deadline or reached_target():
            break
        # optimization: return to a plain local optimum
        cur = local_search(inst, Tour(cur_order), obj_g, deadline=deadline, on_move=note)
        cur_order = np.array(cur.order)
        phases += 1

    trace.tour = Tour(best_order)
    trace.record_final(time.perf_counter() - t_start)
    return trace.tour, trace
