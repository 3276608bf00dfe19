"""Constructive tour heuristics.

Baselines (nearest neighbor, farthest/nearest insertion) plus a greedy
constructor keyed on edge regret.  All tie-breaks are deterministic so
repeated runs build identical tours: candidate nodes tie toward the
lowest id, seed pairs toward the lexicographically smallest pair, and
insertion positions toward the earliest slot in the current tour.
"""

from __future__ import annotations

from typing import List, Union

import numpy as np

from .instance import Instance, distance_matrix
from .regret import RegretMatrix
from .tour import Tour


def nearest_neighbor(inst: Instance, start: int = 0) -> Tour:
    """Repeatedly append the nearest unvisited node."""
    n = inst.n
    if not (0 <= start < n):
        raise ValueError(f"start node {start} out of range for n={n}")
    w = distance_matrix(inst)
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    for _ in range(n - 1):
        d = np.where(visited, np.inf, w[cur])
        cur = int(np.argmin(d))  # first minimum, so ties go to the lowest id
        order.append(cur)
        visited[cur] = True
    return Tour(order)


def _cheapest_insertion_slot(w: np.ndarray, order: List[int], v: int) -> int:
    """Index k such that inserting v between order[k] and order[k+1] (cyclic)
    is cheapest; earliest slot wins ties."""
    best_k = 0
    best_cost = np.inf
    for k in range(len(order)):
        a = order[k]
        b = order[(k + 1) % len(order)]
        cost = w[a, v] + w[v, b] - w[a, b]
        if cost < best_cost:
            best_cost = cost
            best_k = k
    return best_k


def _seed_pair(w: np.ndarray, farthest: bool) -> tuple:
    n = w.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    vals = w[iu, ju]
    pick = int(np.argmax(vals)) if farthest else int(np.argmin(vals))
    # triu_indices enumerates pairs in lexicographic order, so the first
    # extremum is the lexicographically smallest tied pair
    return int(iu[pick]), int(ju[pick])


def _insertion(inst: Instance, farthest: bool) -> Tour:
    n = inst.n
    w = distance_matrix(inst)
    i, j = _seed_pair(w, farthest)
    order = [i, j]
    visited = np.zeros(n, dtype=bool)
    visited[i] = visited[j] = True
    # distance from each node to the partial tour, updated incrementally
    to_tour = np.minimum(w[:, i], w[:, j])
    for _ in range(n - 2):
        d = np.where(visited, -np.inf if farthest else np.inf, to_tour)
        v = int(np.argmax(d)) if farthest else int(np.argmin(d))
        k = _cheapest_insertion_slot(w, order, v)
        order.insert(k + 1, v)
        visited[v] = True
        to_tour = np.minimum(to_tour, w[:, v])
    return Tour(order)


def farthest_insertion(inst: Instance) -> Tour:
    """Seed with the farthest pair; repeatedly insert the node farthest
    from the partial tour at its cheapest position."""
    return _insertion(inst, farthest=True)


def nearest_insertion(inst: Instance) -> Tour:
    """Seed with the nearest pair; repeatedly insert the node nearest
    to the partial tour at its cheapest position."""
    return _insertion(inst, farthest=False)


def regret_greedy(
    inst: Instance, r: Union[RegretMatrix, np.ndarray], start: int = 0
) -> Tour:
    """Nearest-neighbor scheme keyed on regret instead of weight.

    From the current node, move to the unvisited node whose connecting
    edge has the lowest regret; ties break by lower edge weight, then by
    lower node id.  The cycle closes through the last remaining edge.
    """
    n = inst.n
    if not (0 <= start < n):
        raise ValueError(f"start node {start} out of range for n={n}")
    values = r.values if isinstance(r, RegretMatrix) else np.asarray(r, dtype=np.float64)
    if values.shape != (n, n):
        raise ValueError(
            f"regret matrix is {values.shape[0]}x{values.shape[1]} "
            f"but the instance has n={n} nodes"
        )
    w = distance_matrix(inst)
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    for _ in range(n - 1):
        cand = np.flatnonzero(~visited)
        # last key is the primary sort key
        pick = np.lexsort((cand, w[cur, cand], values[cur, cand]))[0]
        cur = int(cand[pick])
        order.append(cur)
        visited[cur] = True
    return Tour(order)
