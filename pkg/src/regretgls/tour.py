"""Tour representation and cost accounting.

A tour is a permutation of all node ids; the edge from the last node back
to the first is implicit.  Tours are value objects: two tours are the same
cycle iff their canonical forms are equal (rotated so node 0 leads,
oriented so the smaller neighbor of 0 comes second).
"""

from __future__ import annotations

from typing import Iterable, List, Sequence, Set, Tuple

import numpy as np

from .instance import Instance, distance_matrix


class Tour:
    __slots__ = ("order",)

    def __init__(self, order: Sequence[int]):
        arr = np.asarray(order, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError(f"tour order must be 1-d, got shape {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.order = arr

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tour):
            return NotImplemented
        a, b = self.canonical().order, other.canonical().order
        return a.shape == b.shape and bool(np.array_equal(a, b))

    def __hash__(self) -> int:
        return hash(tuple(self.canonical().order.tolist()))

    def __repr__(self) -> str:
        return f"Tour({self.order.tolist()})"

    def validate(self, n: int) -> None:
        """Check this is a permutation of 0..n-1."""
        if len(self.order) != n:
            raise ValueError(f"tour visits {len(self.order)} nodes, instance has {n}")
        seen = np.zeros(n, dtype=bool)
        for v in self.order:
            if not (0 <= v < n):
                raise ValueError(f"node {v} out of range for n={n}")
            if seen[v]:
                raise ValueError(f"node {v} visited twice")
            seen[v] = True

    def canonical(self) -> "Tour":
        """Rotate so node 0 is first; orient so the second node is the
        smaller of 0's two neighbors."""
        order = self.order
        zero_at = int(np.where(order == 0)[0][0])
        rolled = np.roll(order, -zero_at)
        if len(rolled) > 2 and rolled[-1] < rolled[1]:
            rolled = np.concatenate(([0], rolled[:0:-1]))
        return Tour(rolled)

    def edges(self) -> Set[Tuple[int, int]]:
        """Undirected edge set, each edge as (min, max)."""
        order = self.order
        out = set()
        for k in range(len(order)):
            a = int(order[k])
            b = int(order[(k + 1) % len(order)])
            out.add((a, b) if a < b else (b, a))
        return out


def tour_cost(inst: Instance, tour: Tour) -> float:
    w = distance_matrix(inst)
    order = tour.order
    return float(w[order, np.roll(order, -1)].sum())


def tour_cost_matrix(w: np.ndarray, order: np.ndarray) -> float:
    """Cost of a tour given an explicit weight matrix (used with guide costs)."""
    return float(w[order, np.roll(order, -1)].sum())


# -----------------------------
# Tour files: node ids on one line, then "cost <value>"
# -----------------------------
def save_tour(tour: Tour, cost: float, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(" ".join(str(int(v)) for v in tour.order) + "\n")
        f.write(f"cost {cost!r}\n")


def load_tour(path) -> Tuple[Tour, float]:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if len(lines) < 2 or not lines[1].startswith("cost "):
        raise ValueError(f"malformed tour file {path}")
    order = [int(tok) for tok in lines[0].split()]
    cost = float(lines[1].split(None, 1)[1])
    return Tour(order), cost
