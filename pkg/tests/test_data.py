"""Line graphs, scaling, and the training-record export."""
import numpy as np
import pytest

from regretgls.data import (
    LineGraph,
    build_record,
    export_dataset,
    line_graph,
    load_dataset,
    scale_channel,
    split_dataset,
    unscale_channel,
)
from regretgls.features import CHANNELS
from regretgls.instance import generate_random, instance_from_record
from regretgls.regret import exact_optimum, regret_matrix


def test_line_graph_counts():
    for n in range(3, 13):
        lg = line_graph(n)
        assert lg.node_count == n * (n - 1) // 2
        assert lg.arcs.shape == (n * (n - 1) * (n - 2), 2)
    with pytest.raises(ValueError):
        line_graph(2)


def test_line_graph_pairs_are_lexicographic():
    lg = line_graph(5)
    pairs = [tuple(p) for p in lg.pairs]
    assert pairs == sorted(pairs)
    assert all(i < j for i, j in pairs)


def test_pair_index_round_trip():
    lg = line_graph(9)
    for p, (i, j) in enumerate(lg.pairs):
        assert lg.pair_index(int(i), int(j)) == p
        assert lg.pair_index(int(j), int(i)) == p
    with pytest.raises(ValueError):
        lg.pair_index(4, 4)


def test_line_graph_adjacency_is_shared_endpoint():
    n = 6
    lg = line_graph(n)
    arc_set = {(int(a), int(b)) for a, b in lg.arcs}
    for p in range(lg.node_count):
        for q in range(lg.node_count):
            if p == q:
                assert (p, q) not in arc_set
                continue
            shares = bool(set(lg.pairs[p]) & set(lg.pairs[q]))
            assert ((p, q) in arc_set) == shares
    # Directed: both orientations present.
    assert all((b, a) in arc_set for a, b in arc_set)


def test_line_graph_arcs_grouped_by_source():
    lg = line_graph(7)
    src = lg.arcs[:, 0]
    assert np.all(np.diff(src) >= 0)


def test_scale_channel_round_trip():
    rng = np.random.default_rng(3)
    x = rng.normal(size=40) * 7 + 3
    scaled, lo, span = scale_channel(x)
    assert scaled.min() == 0.0
    assert scaled.max() == 1.0
    assert np.allclose(unscale_channel(scaled, lo, span), x, atol=1e-12)


def test_scale_channel_constant_input():
    x = np.full(5, 2.5)
    scaled, lo, span = scale_channel(x)
    assert np.all(scaled == 0.0)
    assert lo == 2.5 and span == 1.0
    assert np.array_equal(unscale_channel(scaled, lo, span), x)


def test_build_record_fields(inst10):
    rec = build_record(inst10)
    assert set(rec.keys()) == {
        "name", "n", "instance", "nodes", "channels", "target",
        "target_scaling", "feature_scaling", "arcs",
    }
    m = 10 * 9 // 2
    assert rec["n"] == 10
    assert len(rec["nodes"]) == m
    assert len(rec["target"]) == m
    assert len(rec["arcs"]) == 10 * 9 * 8
    assert set(rec["channels"].keys()) == set(CHANNELS)
    for name in CHANNELS:
        vals = np.array(rec["channels"][name])
        assert len(vals) == m
        assert vals.min() >= 0.0 and vals.max() <= 1.0
        sc = rec["feature_scaling"][name]
        assert set(sc.keys()) == {"min", "scale"}


def test_build_record_target_scaling(inst10):
    rec = build_record(inst10)
    lg = line_graph(inst10)
    iu, ju = lg.pairs[:, 0], lg.pairs[:, 1]
    raw = regret_matrix(inst10).values[iu, ju]
    assert rec["target_scaling"]["max"] == pytest.approx(raw.max(), abs=0.0)
    back = np.array(rec["target"]) * rec["target_scaling"]["max"]
    assert np.allclose(back, raw, atol=1e-15)
    assert max(rec["target"]) == 1.0


def test_build_record_target_zeros_cover_optimal_tour(inst10, opt10):
    # Every optimal-tour edge is an exact zero in the target vector.
    _, opt_tour = opt10
    rec = build_record(inst10)
    lg = line_graph(inst10)
    target = rec["target"]
    zero_positions = {p for p, v in enumerate(target) if v == 0.0}
    for i, j in opt_tour.edges():
        assert lg.pair_index(i, j) in zero_positions
    assert len(zero_positions) >= 10


def test_build_record_embeds_instance(inst10):
    rec = build_record(inst10)
    back = instance_from_record(rec["instance"])
    assert back.n == inst10.n
    assert np.array_equal(back.coords, inst10.coords)


def test_build_record_channel_subset(inst10):
    rec = build_record(inst10, channels=["weight", "mst"])
    assert list(rec["channels"].keys()) == ["weight", "mst"]
    with pytest.raises(ValueError, match="unknown"):
        build_record(inst10, channels=["weight", "regret"])


def test_export_skips_oversized(tmp_path, caplog):
    import logging

    small = [generate_random(8, seed=s) for s in range(3)]
    big = generate_random(25, seed=99)
    path = tmp_path / "set.jsonl"
    with caplog.at_level(logging.WARNING):
        count = export_dataset(small + [big], path)
    assert count == 3
    assert "n=25" in caplog.text
    records = load_dataset(path)
    assert len(records) == 3
    assert [r["n"] for r in records] == [8, 8, 8]


def test_split_dataset():
    records = list(range(10))
    train, val = split_dataset(records, (0.8, 0.2), seed=1)
    assert len(train) == 8 and len(val) == 2
    assert sorted(train + val) == records
    again = split_dataset(records, (0.8, 0.2), seed=1)
    assert (train, val) == again
    other = split_dataset(records, (0.8, 0.2), seed=2)
    assert other != (train, val)
    with pytest.raises(ValueError):
        split_dataset(records, (0.7, 0.2), seed=0)
    with pytest.raises(ValueError):
        split_dataset(records[:2], (0.99, 0.01), seed=0)
