"""Edge feature channels: widths, ranks, graph memberships."""
import numpy as np
import pytest

from regretgls.features import (
    CHANNELS,
    KNN_FRACTIONS,
    edge_width,
    feature_channels,
    heuristic_membership,
    knn_membership,
    mst_membership,
    neighbor_rank,
    neighbor_ranks,
    node_width,
    node_widths,
)
from regretgls.instance import Instance, METRIC_EUCLIDEAN, distance_matrix, generate_random


def test_node_widths_simple_geometry():
    # Depot at origin, centroid on the x axis: width is just |y|.
    coords = np.array([[0.0, 0.0], [2.0, 1.0], [2.0, -1.0], [4.0, 0.0]])
    inst = Instance(name="w", n=4, coords=coords, metric=METRIC_EUCLIDEAN)
    widths = node_widths(inst)
    assert widths == pytest.approx([0.0, 1.0, 1.0, 0.0], abs=1e-12)
    assert node_width(inst, 1) == pytest.approx(1.0, abs=1e-12)
    assert edge_width(inst, 1, 3) == pytest.approx(1.0, abs=1e-12)
    assert edge_width(inst, 1, 2) == pytest.approx(0.0, abs=1e-12)


def test_node_widths_degenerate_centroid():
    # Symmetric cloud: centroid == depot, widths collapse to zero.
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    inst = Instance(name="deg", n=5, coords=coords, metric=METRIC_EUCLIDEAN)
    assert np.all(node_widths(inst) == 0.0)


def test_neighbor_ranks_match_manual_sort():
    inst = generate_random(12, seed=31)
    w = distance_matrix(inst)
    rank = neighbor_ranks(inst)
    assert np.all(np.diag(rank) == 0)
    for i in range(12):
        others = [j for j in range(12) if j != i]
        by_dist = sorted(others, key=lambda j: (w[i, j], j))
        for k, j in enumerate(by_dist, start=1):
            assert rank[i, j] == k
    assert neighbor_rank(inst, 0, by_dist[0]) == rank[0, by_dist[0]]
    with pytest.raises(ValueError):
        neighbor_rank(inst, 2, 2)


def test_neighbor_rank_tie_prefers_lower_id():
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [3.0, 3.0]])
    inst = Instance(name="tie", n=4, coords=coords, metric=METRIC_EUCLIDEAN)
    rank = neighbor_ranks(inst)
    assert rank[0, 1] == 1  # ties with node 2 at distance 1
    assert rank[0, 2] == 2


def test_knn_membership_k_rule():
    inst = generate_random(10, seed=5)
    rank = neighbor_ranks(inst)
    # n=10: k = 3, 2, 1 for the three fractions.
    for name, frac, k in (("knn30", 0.3, 3), ("knn20", 0.2, 2), ("knn10", 0.1, 1)):
        assert KNN_FRACTIONS[name] == frac
        member = knn_membership(inst, frac)
        expected = (rank >= 1) & (rank <= k)
        expected = expected | expected.T
        assert np.array_equal(member, expected)
        assert np.array_equal(member, member.T)
        assert not member.diagonal().any()


def test_knn_k_rounds_half_up():
    # fraction*n = 2.5 -> k = 3; a rank-3 one-way pair must be included.
    inst = generate_random(25, seed=9)
    member = knn_membership(inst, 0.1)
    rank = neighbor_ranks(inst)
    sym = np.minimum(rank, rank.T)
    off = ~np.eye(25, dtype=bool)
    assert np.array_equal(member[off], (sym[off] >= 1) & (sym[off] <= 3))


def kruskal_mst_edges(w):
    n = w.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = sorted(
        ((w[i, j], i, j) for i in range(n) for j in range(i + 1, n))
    )
    out = set()
    for _, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.add((i, j))
    return out


def test_mst_matches_kruskal():
    # Generic instances: the MST is unique, so any correct algorithm agrees.
    for seed in range(8):
        inst = generate_random(14, seed=seed)
        member = mst_membership(inst)
        assert np.array_equal(member, member.T)
        got = {(i, j) for i in range(14) for j in range(i + 1, 14) if member[i, j]}
        assert got == kruskal_mst_edges(distance_matrix(inst))
        assert len(got) == 13


def test_mst_total_weight_on_grid():
    # 2x3 unit grid: 5 unit edges span it; total weight 5.
    coords = np.array(
        [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]]
    )
    inst = Instance(name="grid", n=6, coords=coords, metric=METRIC_EUCLIDEAN)
    member = mst_membership(inst)
    w = distance_matrix(inst)
    total = w[member].sum() / 2.0
    assert total == pytest.approx(5.0, abs=1e-12)


def test_heuristic_membership(inst10):
    nn_sol, ni_sol = heuristic_membership(inst10)
    for m in (nn_sol, ni_sol):
        assert np.array_equal(m, m.T)
        assert m.sum() == 2 * 10  # a tour has n undirected edges
        assert np.array_equal(m.sum(axis=0), np.full(10, 2))


def test_feature_channels_complete(inst10):
    chans = feature_channels(inst10)
    assert tuple(chans.keys()) == CHANNELS
    w = distance_matrix(inst10)
    for name, mat in chans.items():
        assert mat.shape == (10, 10)
        assert mat.dtype == np.float64
    assert np.array_equal(chans["weight"], w)
    assert np.array_equal(chans["node_width_i"], chans["node_width_j"].T)
    assert np.array_equal(chans["depot_weight_i"], chans["depot_weight_j"].T)
    assert np.array_equal(chans["neighbor_rank_ij"], chans["neighbor_rank_ji"].T)
    assert np.array_equal(chans["depot_weight_i"][:, 0], w[0])
    for name in ("knn30", "knn20", "knn10", "mst", "nn_sol", "ni_sol"):
        assert set(np.unique(chans[name])) <= {0.0, 1.0}
