"""Best-improvement local search over the 2-opt and relocate neighborhoods.

Move deltas are computed as dense matrices in one vectorized pass per
scan; no candidate lists or don't-look bits, so every scan is an exact
exhaustive enumeration of the operator's neighborhood.  A restricted
mode scans only the moves that remove one designated tour edge, which is
what the penalty-driven perturbation needs.

The objective is always a sum of per-edge effective costs over the
tour's edges; plain cost and penalty-augmented cost differ only in the
effective cost matrix, so both share the same delta formulas.
"""

from __future__ import annotations

import time
from typing import Callable, Optional, Tuple

import numpy as np

from .instance import Instance, distance_matrix
from .tour import Tour

# moves must beat this margin so float dust cannot cycle the search
IMPROVE_EPS = 1e-10


class Objective:
    """Tour cost functional: sum of a fixed effective cost matrix over
    the tour's edges."""

    __slots__ = ("matrix",)

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"cost matrix must be square, got {m.shape}")
        self.matrix = m

    def cost(self, order: np.ndarray) -> float:
        return float(self.matrix[order, np.roll(order, -1)].sum())


def plain_objective(inst: Instance) -> Objective:
    return Objective(distance_matrix(inst))


# -----------------------------
# Move deltas and application
# -----------------------------
def two_opt_deltas(matrix: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Delta matrix D[a-1, b-1] for reversing the segment order[a..b],
    1 <= a < b <= n-1; invalid cells (including the full-reversal
    identity (1, n-1)) hold +inf."""
    n = len(order)
    prev = order[:-1]              # order[a-1] for a = 1..n-1
    curr = order[1:]               # order[a]
    nxt = np.roll(order, -1)[1:]   # order[b+1 mod n] for b = 1..n-1
    d = (
        matrix[np.ix_(prev, curr)]           # new edge (order[a-1], order[b])
        + matrix[np.ix_(curr, nxt)]          # new edge (order[a], order[b+1])
        - matrix[prev, curr][:, None]        # old edge (order[a-1], order[a])
        - matrix[curr, nxt][None, :]         # old edge (order[b], order[b+1])
    )
    m = n - 1
    mask = np.triu(np.ones((m, m), dtype=bool), k=1)
    mask[0, m - 1] = False
    d[~mask] = np.inf
    return d


def apply_two_opt(order: np.ndarray, a: int, b: int) -> np.ndarray:
    out = order.copy()
    out[a : b + 1] = out[a : b + 1][::-1]
    return out


def relocate_deltas(matrix: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Delta matrix D[f, g] for removing the node at position f and
    reinserting it between positions g and g+1 (cyclic); the identity
    slots g in {f-1, f} hold +inf."""
    n = len(order)
    succ = np.roll(order, -1)
    pred = np.roll(order, 1)
    removal = matrix[pred, succ] - matrix[pred, order] - matrix[order, succ]
    a = matrix[np.ix_(order, order)]
    # insertion[f, g] = w(order[g], order[f]) + w(order[f], order[g+1]) - w(order[g], order[g+1])
    insertion = a.T + np.roll(a, -1, axis=1) - matrix[order, succ][None, :]
    d = removal[:, None] + insertion
    idx = np.arange(n)
    d[idx, idx] = np.inf
    d[idx, (idx - 1) % n] = np.inf
    return d


def apply_relocate(order: np.ndarray, f: int, g: int) -> np.ndarray:
    n = len(order)
    node = order[f]
    anchor = order[g]
    rest = np.delete(order, f)
    at = int(np.where(rest == anchor)[0][0])
    return np.concatenate((rest[: at + 1], [node], rest[at + 1 :]))


def _best_flat(d: np.ndarray) -> Tuple[float, int, int]:
    k = int(np.argmin(d))
    i, j = divmod(k, d.shape[1])
    return float(d[i, j]), i, j


# -----------------------------
# Search drivers
# -----------------------------
def local_search(
    inst: Instance,
    t0: Tour,
    obj: Objective,
    deadline: Optional[float] = None,
    on_move: Optional[Callable[[np.ndarray], None]] = None,
) -> Tour:
    """Alternate 2-opt and relocate: scan the current operator's whole
    neighborhood, apply its best strictly improving move, switch
    operator.  Stops at a joint local optimum or at the deadline, which
    is checked between scans."""
    order = np.array(t0.order, dtype=np.int64)
    n = len(order)
    if n != inst.n:
        raise ValueError(f"tour visits {n} nodes, instance has {inst.n}")
    m = obj.matrix
    use_two_opt = True
    fails = 0
    while fails < 2:
        if deadline is not None and time.perf_counter() >= deadline:
            break
        if use_two_opt:
            delta, i, j = _best_flat(two_opt_deltas(m, order))
            if delta < -IMPROVE_EPS:
                order = apply_two_opt(order, i + 1, j + 1)
                fails = 0
            else:
                fails += 1
        else:
            delta, f, g = _best_flat(relocate_deltas(m, order))
            if delta < -IMPROVE_EPS:
                order = apply_relocate(order, f, g)
                fails = 0
            else:
                fails += 1
        if fails == 0 and on_move is not None:
            on_move(order)
        use_two_opt = not use_two_opt
    return Tour(order)


def _edge_position(order: np.ndarray, edge: Tuple[int, int]) -> int:
    """Position f with (order[f], order[f+1 mod n]) == edge in either
    orientation, or -1 when the edge is not in the tour."""
    u, v = edge
    succ = np.roll(order, -1)
    hits = np.flatnonzero(((order == u) & (succ == v)) | ((order == v) & (succ == u)))
    return int(hits[0]) if hits.size else -1


def restricted_local_search(
    inst: Instance, t: Tour, edge: Tuple[int, int], obj: Objective
) -> Tuple[Tour, bool]:
    """Apply the best improving move that removes `edge` from the tour.

    Candidate moves: 2-opt cuts using the edge as one of the two cut
    edges, and relocations of either endpoint to a slot not adjacent to
    the other endpoint.  Returns (tour, True) when a move was applied;
    (t, False) when the edge is absent or nothing improves.
    """
    order = np.array(t.order, dtype=np.int64)
    n = len(order)
    f = _edge_position(order, edge)
    if f < 0:
        return t, False
    m = obj.matrix

    best_delta = -IMPROVE_EPS
    best_move = None

    d2 = two_opt_deltas(m, order)
    rows = np.arange(d2.shape[0])
    # cut edge (order[a-1], order[a]) == edge when a == f+1; cut edge
    # (order[b], order[b+1]) == edge when b == f (f == n-1 is the wrap edge)
    keep = np.zeros_like(d2, dtype=bool)
    if f + 1 <= n - 1:
        keep[f, :] = True  # row index a-1 == f
    if f >= 1:
        keep[:, f - 1] = True  # col index b-1 == f-1
    masked = np.where(keep, d2, np.inf)
    delta, i, j = _best_flat(masked)
    if delta < best_delta:
        best_delta = delta
        best_move = ("two_opt", i + 1, j + 1)

    dr = relocate_deltas(m, order)
    pos_u, pos_v = f, (f + 1) % n
    for pos in (pos_u, pos_v):
        row = dr[pos].copy()
        # slots adjacent to the other endpoint would recreate the edge
        row[[(f - 1) % n, f, (f + 1) % n]] = np.inf
        g = int(np.argmin(row))
        if row[g] < best_delta:
            best_delta = float(row[g])
            best_move = ("relocate", pos, g)

    if best_move is None:
        return t, False
    kind, x, y = best_move
    if kind == "two_opt":
        return Tour(apply_two_opt(order, x, y)), True
    return Tour(apply_relocate(order, x, y)), True
