"""Exact edge-regret oracle for small TSP instances.

The regret of an edge (i, j) is the relative cost increase of the best
tour that is forced to use (i, j) over the unconstrained optimum:

    regret(i, j) = g(best tour through ij) / g(best tour) - 1

Edges of an optimal tour have regret zero; every other edge is positive.
The forced optimum decomposes as

    g(best tour through ij) = w(i, j) + (min Hamiltonian i-j path cost)

and the Hamiltonian path costs are computed by a subset dynamic program
over all endpoints j for a fixed anchor i, so n - 1 anchor runs cover
every pair.  State space is 2^(n-1) * (n-1), which caps the oracle at
n = 21 on ordinary hardware.

A permutation enumerator is included as an independent reference for
validating the dynamic program on n <= 11.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from numba import njit

from .instance import Instance, distance_matrix
from .tour import Tour

MAX_DP_NODES = 20
MAX_ENUM_NODES = 10

# regrets below this are summation dust from the subset DP, not signal
REGRET_SNAP_EPS = 1e-12


def _check_dp_size(n: int) -> None:
    if n > MAX_DP_NODES:
        raise ValueError(
            f"exact oracle needs 2^(n-1)*(n-1) floats; n={n} exceeds the "
            f"n<={MAX_DP_NODES} memory cap"
        )


# -----------------------------
# Subset dynamic program
# -----------------------------
@njit(cache=True)
def _optimum_kernel(w: np.ndarray) -> Tuple[float, np.ndarray]:
    """Best tour cost and order, anchored at node 0.

    dp[S, k] = cost of the cheapest path that starts at node 0, visits
    exactly the nodes of S (a bitmask over nodes 1..n-1, bit k = node k+1),
    and ends at node k+1.
    """
    n = w.shape[0]
    m = n - 1
    size = 1 << m
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int8)
    for k in range(m):
        dp[1 << k, k] = w[0, k + 1]
    members = np.empty(m, dtype=np.int64)
    outside = np.empty(m, dtype=np.int64)
    for S in range(1, size - 1):
        nin = 0
        nout = 0
        for k in range(m):
            if (S >> k) & 1:
                members[nin] = k
                nin += 1
            else:
                outside[nout] = k
                nout += 1
        for a in range(nin):
            k = members[a]
            base = dp[S, k]
            for b in range(nout):
                j = outside[b]
                S2 = S | (1 << j)
                cand = base + w[k + 1, j + 1]
                if cand < dp[S2, j]:
                    dp[S2, j] = cand
                    parent[S2, j] = k
    full = size - 1
    best = np.inf
    best_k = -1
    for k in range(m):
        v = dp[full, k] + w[k + 1, 0]
        if v < best:
            best = v
            best_k = k
    order = np.empty(n, dtype=np.int64)
    order[0] = 0
    S = full
    k = best_k
    for pos in range(n - 1, 0, -1):
        order[pos] = k + 1
        pk = parent[S, k]
        S &= ~(1 << k)
        k = pk
    return best, order


@njit(cache=True)
def _fixed_edge_kernel(w: np.ndarray) -> np.ndarray:
    """Matrix of forced-edge optima: cell (i, j) is the cost of the best
    tour containing edge (i, j).  Diagonal is left at +inf."""
    n = w.shape[0]
    m = n - 1
    size = 1 << m
    fixed = np.full((n, n), np.inf)
    dp = np.empty((size, m))
    members = np.empty(m, dtype=np.int64)
    outside = np.empty(m, dtype=np.int64)
    # anchors 0..n-2 cover every pair: any pair has a member below n-1
    for anchor in range(n - 1):
        for s in range(size):
            for k in range(m):
                dp[s, k] = np.inf
        # local index k maps to node k when k < anchor, else k + 1
        for k in range(m):
            node_k = k if k < anchor else k + 1
            dp[1 << k, k] = w[anchor, node_k]
        for S in range(1, size - 1):
            nin = 0
            nout = 0
            for k in range(m):
                if (S >> k) & 1:
                    members[nin] = k
                    nin += 1
                else:
                    outside[nout] = k
                    nout += 1
            for a in range(nin):
                k = members[a]
                base = dp[S, k]
                node_k = k if k < anchor else k + 1
                for b in range(nout):
                    j = outside[b]
                    node_j = j if j < anchor else j + 1
                    S2 = S | (1 << j)
                    cand = base + w[node_k, node_j]
                    if cand < dp[S2, j]:
                        dp[S2, j] = cand
        full = size - 1
        for k in range(m):
            node_k = k if k < anchor else k + 1
            v = w[anchor, node_k] + dp[full, k]
            # anchor node_k and anchor anchor see the same paths in opposite
            # directions; keep the smaller float so the matrix stays symmetric
            if v < fixed[anchor, node_k]:
                fixed[anchor, node_k] = v
                fixed[node_k, anchor] = v
    return fixed


def exact_optimum(inst: Instance) -> Tuple[float, Tour]:
    """Provably optimal tour via the subset dynamic program."""
    _check_dp_size(inst.n)
    w = distance_matrix(inst)
    cost, order = _optimum_kernel(w)
    return float(cost), Tour(order).canonical()


def fixed_edge_optima(inst: Instance) -> np.ndarray:
    """(n, n) matrix of best tour costs forced through each edge."""
    _check_dp_size(inst.n)
    cached = inst._dist_cache.get("fixed")
    if cached is None:
        cached = _fixed_edge_kernel(distance_matrix(inst))
        cached.setflags(write=False)
        inst._dist_cache["fixed"] = cached
    return cached


def fixed_edge_optimum(inst: Instance, i: int, j: int) -> float:
    """Cost of the best tour forced through edge (i, j)."""
    if i == j:
        raise ValueError(f"edge ({i},{j}) is a self-loop")
    if not (0 <= i < inst.n and 0 <= j < inst.n):
        raise ValueError(f"node out of range: ({i},{j}) for n={inst.n}")
    return float(fixed_edge_optima(inst)[i, j])


# -----------------------------
# Permutation enumeration (reference implementation, n <= 11)
# -----------------------------
_ORDERS_CACHE: Dict[int, np.ndarray] = {}


def enumerate_tour_orders(n: int) -> np.ndarray:
    """All distinct cycles as rows: node 0 first, second node smaller than
    the last (one representative per rotation/reflection class)."""
    if n > MAX_ENUM_NODES:
        raise ValueError(f"enumeration is (n-1)!/2 tours; refusing n={n} > {MAX_ENUM_NODES}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    arr = _ORDERS_CACHE.get(n)
    if arr is None:
        perms = [p for p in itertools.permutations(range(1, n)) if p[0] < p[-1]]
        arr = np.empty((len(perms), n), dtype=np.int64)
        arr[:, 0] = 0
        arr[:, 1:] = perms
        arr.setflags(write=False)
        _ORDERS_CACHE[n] = arr
    return arr


def enumerate_tour_costs(inst: Instance) -> Tuple[np.ndarray, np.ndarray]:
    """(orders, costs) over every distinct cycle of the instance."""
    orders = enumerate_tour_orders(inst.n)
    w = distance_matrix(inst)
    costs = w[orders, np.roll(orders, -1, axis=1)].sum(axis=1)
    return orders, costs


def brute_force_optimum(inst: Instance) -> Tuple[float, Tour]:
    """Optimal tour by full enumeration; ties break to the lexicographically
    first order, which is already in canonical form."""
    orders, costs = enumerate_tour_costs(inst)
    i = int(np.argmin(costs))
    return float(costs[i]), Tour(orders[i])


def brute_force_fixed_edge(inst: Instance, i: int, j: int) -> float:
    """Cost of the best tour containing edge (i, j), by full enumeration."""
    if i == j:
        raise ValueError(f"edge ({i},{j}) is a self-loop")
    orders, costs = enumerate_tour_costs(inst)
    succ = np.roll(orders, -1, axis=1)
    has_edge = (((orders == i) & (succ == j)) | ((orders == j) & (succ == i))).any(axis=1)
    return float(costs[has_edge].min())


# -----------------------------
# Regret matrix
# -----------------------------
@dataclass(frozen=True)
class RegretMatrix:
    n: int
    values: np.ndarray  # (n, n) symmetric, zero diagonal, >= 0
    provenance: str = "oracle"  # "oracle" | "predicted"
    optimum: Optional[float] = None  # g of the best tour, oracle only
    tour: Optional[Tour] = None  # an optimal tour, oracle only


def regret_matrix(inst: Instance) -> RegretMatrix:
    """Exact regret for every edge of the instance."""
    fixed = fixed_edge_optima(inst)
    optimum, tour = exact_optimum(inst)
    values = fixed / optimum - 1.0
    np.fill_diagonal(values, 0.0)
    # optimal-tour edges are exactly 0 in exact arithmetic, but the forced
    # and unforced optima are summed in different orders, leaving ~1e-15
    # dust of either sign; snap it to 0 (true regrets sit many orders
    # higher on continuous instances)
    values[np.abs(values) < REGRET_SNAP_EPS] = 0.0
    np.clip(values, 0.0, None, out=values)
    values.setflags(write=False)
    return RegretMatrix(
        n=inst.n, values=values, provenance="oracle", optimum=optimum, tour=tour
    )


# -----------------------------
# Regret files: CSV with one row per unordered pair i<j
# -----------------------------
def save_regret(r: RegretMatrix, path) -> None:
    lines = [f"# provenance: {r.provenance}", "i,j,regret"]
    for i in range(r.n):
        for j in range(i + 1, r.n):
            lines.append(f"{i},{j},{float(r.values[i, j])!r}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_regret(path, expect_n: Optional[int] = None) -> RegretMatrix:
    """Load edge regrets into a symmetric RegretMatrix.

    Tolerant of model output: rows in either node order are accepted, a
    pair given in both orders is averaged, and negative values are
    clamped to zero with a warning carrying the clamp count.  Instance
    size is inferred from the largest node index; pass expect_n to fail
    fast on a matrix that does not match the target instance.
    """
    provenance = "predicted"
    pairs: Dict[Tuple[int, int], float] = {}
    dup: Dict[Tuple[int, int], float] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "provenance:" in line:
                    provenance = line.split("provenance:", 1)[1].strip()
                continue
            if line.lower().startswith("i,"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'i,j,regret', got {line!r}")
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric entry in {line!r}") from None
            if i == j:
                raise ValueError(f"{path}:{lineno}: self-loop ({i},{i})")
            key = (i, j) if i < j else (j, i)
            if key in pairs:
                dup[key] = v
            else:
                pairs[key] = v
    if not pairs:
        raise ValueError(f"{path}: no regret rows found")
    n = max(max(k) for k in pairs) + 1
    if expect_n is not None and n != expect_n:
        raise ValueError(
            f"{path}: regret matrix is for n={n} but the instance has n={expect_n}"
        )
    values = np.zeros((n, n))
    seen = np.zeros((n, n), dtype=bool)
    negatives = 0
    for (i, j), v in pairs.items():
        if (i, j) in dup:
            v = 0.5 * (v + dup[i, j])
        if v < 0.0:
            negatives += 1
            v = 0.0
        values[i, j] = values[j, i] = v
        seen[i, j] = seen[j, i] = True
    for i in range(n):
        for j in range(i + 1, n):
            if not seen[i, j]:
                raise ValueError(f"{path}: missing regret for pair ({i},{j})")
    if negatives:
        warnings.warn(f"{path}: clamped {negatives} negative regrets to zero")
    values.setflags(write=False)
    return RegretMatrix(n=n, values=values, provenance=provenance)
