"""Engineered per-edge features.

Fourteen channels per edge, combining raw geometry (weight, widths
relative to the depot-centroid line, depot distances), neighborhood
structure (asymmetric nearest-neighbor ranks, k-NN graph membership at
three densities), and membership in cheap global structures (minimum
spanning tree, nearest-neighbor tour, nearest-insertion tour).

Everything is a pure function of the instance; channels are exposed as
full (n, n) matrices so edge extraction stays a single fancy-index.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from .construct import nearest_insertion, nearest_neighbor
from .instance import Instance, distance_matrix

CHANNELS = (
    "weight",
    "node_width_i",
    "node_width_j",
    "edge_width",
    "depot_weight_i",
    "depot_weight_j",
    "neighbor_rank_ij",
    "neighbor_rank_ji",
    "knn30",
    "knn20",
    "knn10",
    "mst",
    "nn_sol",
    "ni_sol",
)

KNN_FRACTIONS = {"knn30": 0.3, "knn20": 0.2, "knn10": 0.1}


def node_widths(inst: Instance) -> np.ndarray:
    """Perpendicular distance of every node to the line through the
    depot (node 0) and the centroid; all zeros when the centroid
    coincides with the depot (the line is undefined)."""
    depot = inst.coords[0]
    centroid = inst.coords.mean(axis=0)
    axis = centroid - depot
    norm = float(np.hypot(axis[0], axis[1]))
    if norm < 1e-15:
        return np.zeros(inst.n)
    rel = inst.coords - depot
    return np.abs(rel[:, 0] * axis[1] - rel[:, 1] * axis[0]) / norm


def node_width(inst: Instance, v: int) -> float:
    return float(node_widths(inst)[v])


def edge_width(inst: Instance, i: int, j: int) -> float:
    widths = node_widths(inst)
    return float(abs(widths[i] - widths[j]))


def neighbor_ranks(inst: Instance) -> np.ndarray:
    """rank[i, j] = k when j is the k-nearest neighbor of i (1-based,
    ties by lower node id); diagonal is 0.  Generally asymmetric."""
    n = inst.n
    w = distance_matrix(inst)
    ids = np.broadcast_to(np.arange(n), (n, n))
    keyed = np.where(np.eye(n, dtype=bool), np.inf, w)
    order = np.lexsort((ids, keyed), axis=1)  # per row: ascending (weight, id)
    rank = np.empty((n, n), dtype=np.int64)
    rows = np.arange(n)[:, None]
    rank[rows, order] = np.broadcast_to(np.arange(1, n + 1), (n, n))
    np.fill_diagonal(rank, 0)
    return rank


def neighbor_rank(inst: Instance, i: int, j: int) -> int:
    if i == j:
        raise ValueError(f"rank of ({i},{i}) is undefined")
    return int(neighbor_ranks(inst)[i, j])


def knn_membership(inst: Instance, fraction: float) -> np.ndarray:
    """Boolean (n, n): edge (i, j) belongs to the k-NN graph when either
    endpoint ranks the other within its k nearest, k = max(1,
    round-half-up(fraction * n))."""
    k = max(1, int(np.floor(fraction * inst.n + 0.5)))
    rank = neighbor_ranks(inst)
    member = (rank >= 1) & (rank <= k)
    member = member | member.T
    np.fill_diagonal(member, False)
    return member


def mst_membership(inst: Instance) -> np.ndarray:
    """Boolean (n, n) indicator of the minimum spanning tree, grown from
    node 0; weight ties break toward the lexicographically smallest
    (i, j) candidate edge."""
    n = inst.n
    w = distance_matrix(inst)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    key = w[0].copy()
    parent = np.zeros(n, dtype=np.int64)
    member = np.zeros((n, n), dtype=bool)
    for _ in range(n - 1):
        best_v = -1
        best = (np.inf, n, n)
        for v in range(n):
            if in_tree[v]:
                continue
            i, j = (parent[v], v) if parent[v] < v else (v, parent[v])
            cand = (key[v], i, j)
            if cand < best:
                best = cand
                best_v = v
        v = best_v
        in_tree[v] = True
        member[parent[v], v] = member[v, parent[v]] = True
        closer = w[v] < key
        key[closer] = w[v][closer]
        parent[closer] = v
    return member


def heuristic_membership(inst: Instance) -> Tuple[np.ndarray, np.ndarray]:
    """Boolean (n, n) tour-edge indicators for the nearest-neighbor and
    nearest-insertion constructions with default start."""
    n = inst.n
    nn_sol = np.zeros((n, n), dtype=bool)
    ni_sol = np.zeros((n, n), dtype=bool)
    for i, j in nearest_neighbor(inst).edges():
        nn_sol[i, j] = nn_sol[j, i] = True
    for i, j in nearest_insertion(inst).edges():
        ni_sol[i, j] = ni_sol[j, i] = True
    return nn_sol, ni_sol


def feature_channels(inst: Instance) -> Dict[str, np.ndarray]:
    """All channels as float64 (n, n) matrices, keyed by channel name."""
    n = inst.n
    w = distance_matrix(inst)
    widths = node_widths(inst)
    rank = neighbor_ranks(inst)
    nn_sol, ni_sol = heuristic_membership(inst)
    out = {
        "weight": np.array(w),
        "node_width_i": np.broadcast_to(widths[:, None], (n, n)).copy(),
        "node_width_j": np.broadcast_to(widths[None, :], (n, n)).copy(),
        "edge_width": np.abs(widths[:, None] - widths[None, :]),
        "depot_weight_i": np.broadcast_to(w[0][:, None], (n, n)).copy(),
        "depot_weight_j": np.broadcast_to(w[0][None, :], (n, n)).copy(),
        "neighbor_rank_ij": rank.astype(np.float64),
        "neighbor_rank_ji": rank.T.astype(np.float64),
        "mst": mst_membership(inst).astype(np.float64),
        "nn_sol": nn_sol.astype(np.float64),
        "ni_sol": ni_sol.astype(np.float64),
    }
    for name, fraction in KNN_FRACTIONS.items():
        out[name] = knn_membership(inst, fraction).astype(np.float64)
    return {name: out[name] for name in CHANNELS}
