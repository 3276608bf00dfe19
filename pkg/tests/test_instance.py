"""Instance generation, metrics, TSPLIB parsing, and serialization."""
import math

import numpy as np
import pytest

from regretgls.instance import (
    METRIC_EUCLIDEAN,
    METRIC_TSPLIB_EUC2D,
    Instance,
    TsplibParseError,
    distance_matrix,
    edge_weight,
    generate_random,
    instance_from_record,
    instance_to_record,
    load_instances,
    parse_tsplib,
    render_tsplib,
    save_instances,
)


def test_generate_random_is_deterministic():
    a = generate_random(12, seed=3)
    b = generate_random(12, seed=3)
    assert np.array_equal(a.coords, b.coords)
    assert a.name == b.name
    c = generate_random(12, seed=4)
    assert not np.array_equal(a.coords, c.coords)


def test_generate_random_unit_square():
    inst = generate_random(50, seed=0)
    assert inst.coords.shape == (50, 2)
    assert inst.coords.min() >= 0.0
    assert inst.coords.max() <= 1.0
    assert inst.metric == METRIC_EUCLIDEAN
    assert inst.seed == 0


def test_instance_validation():
    coords = np.zeros((2, 2))
    with pytest.raises(ValueError):
        Instance(name="tiny", n=2, coords=coords, metric=METRIC_EUCLIDEAN)
    with pytest.raises(ValueError):
        Instance(name="bad", n=3, coords=np.zeros((3, 3)), metric=METRIC_EUCLIDEAN)
    with pytest.raises(ValueError):
        Instance(name="bad", n=3, coords=np.zeros((3, 2)), metric="manhattan")


def test_coords_are_read_only():
    inst = generate_random(5, seed=1)
    with pytest.raises(ValueError):
        inst.coords[0, 0] = 99.0


def test_edge_weight_euclidean():
    inst = generate_random(8, seed=2)
    d = math.hypot(
        inst.coords[3, 0] - inst.coords[5, 0], inst.coords[3, 1] - inst.coords[5, 1]
    )
    assert edge_weight(inst, 3, 5) == pytest.approx(d, abs=0.0)
    assert edge_weight(inst, 5, 3) == edge_weight(inst, 3, 5)
    with pytest.raises(ValueError):
        edge_weight(inst, 4, 4)


def test_edge_weight_tsplib_rounding():
    # EUC_2D rounds to nearest integer: 3-4-5 triangle plus a half offset.
    coords = np.array([[0.0, 0.0], [3.0, 4.0], [10.0, 0.4]])
    inst = Instance(name="t", n=3, coords=coords, metric=METRIC_TSPLIB_EUC2D)
    assert edge_weight(inst, 0, 1) == 5.0
    assert edge_weight(inst, 0, 2) == 10.0  # sqrt(100.16) = 10.008 rounds down


def test_distance_matrix_matches_pairwise():
    inst = generate_random(9, seed=5)
    w = distance_matrix(inst)
    assert w.shape == (9, 9)
    assert np.array_equal(w, w.T)
    assert np.all(np.diag(w) == 0.0)
    for i in range(9):
        for j in range(i + 1, 9):
            assert w[i, j] == edge_weight(inst, i, j)
    with pytest.raises(ValueError):
        w[0, 1] = 1.0


def test_distance_matrix_is_cached():
    inst = generate_random(6, seed=6)
    assert distance_matrix(inst) is distance_matrix(inst)


TSPLIB_DOC = """NAME : toy4
COMMENT : four points
TYPE : TSP
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0.0 0.0
2 30.0 0.0
3 30.0 40.0
4 0.0 40.0
EOF
"""


def test_parse_tsplib():
    inst = parse_tsplib(TSPLIB_DOC)
    assert inst.name == "toy4"
    assert inst.n == 4
    assert inst.metric == METRIC_TSPLIB_EUC2D
    assert edge_weight(inst, 0, 1) == 30.0
    assert edge_weight(inst, 1, 2) == 40.0
    assert edge_weight(inst, 0, 2) == 50.0


def test_parse_tsplib_errors():
    with pytest.raises(TsplibParseError, match="TYPE"):
        parse_tsplib(TSPLIB_DOC.replace("TYPE : TSP", "TYPE : ATSP"))
    with pytest.raises(TsplibParseError, match="EDGE_WEIGHT_TYPE"):
        parse_tsplib(TSPLIB_DOC.replace("EUC_2D", "GEO"))
    with pytest.raises(TsplibParseError, match="DIMENSION"):
        parse_tsplib(TSPLIB_DOC.replace("DIMENSION : 4\n", ""))
    # Node count must match DIMENSION.
    with pytest.raises(TsplibParseError):
        parse_tsplib(TSPLIB_DOC.replace("4 0.0 40.0\n", ""))
    with pytest.raises(TsplibParseError):
        parse_tsplib(TSPLIB_DOC.replace("2 30.0 0.0", "2 thirty 0.0"))


def test_render_tsplib_round_trip():
    inst = generate_random(7, seed=9)
    doc = render_tsplib(inst)
    back = parse_tsplib(doc)
    assert back.n == inst.n
    assert np.allclose(back.coords, inst.coords, atol=0.0)
    assert back.metric == METRIC_TSPLIB_EUC2D  # TSPLIB always carries EUC_2D


def test_record_round_trip():
    inst = generate_random(11, seed=13)
    rec = instance_to_record(inst)
    back = instance_from_record(rec)
    assert back.name == inst.name
    assert back.n == inst.n
    assert back.metric == inst.metric
    assert back.seed == inst.seed
    assert np.array_equal(back.coords, inst.coords)


def test_save_load_instances(tmp_path):
    batch = [generate_random(6, seed=s) for s in range(4)]
    path = tmp_path / "batch.jsonl"
    count = save_instances(batch, path)
    assert count == 4
    loaded = load_instances(path)
    assert len(loaded) == 4
    for a, b in zip(batch, loaded):
        assert a.name == b.name
        assert np.array_equal(a.coords, b.coords)


def test_bundled_berlin52_parses():
    import pathlib

    text = (pathlib.Path(__file__).parent / "data" / "berlin52.tsp").read_text()
    inst = parse_tsplib(text)
    assert inst.n == 52
    assert inst.metric == METRIC_TSPLIB_EUC2D
