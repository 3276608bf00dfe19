"""Tour canonical form, equality, cost, and round-trips."""
import numpy as np
import pytest

from regretgls.instance import generate_random
from regretgls.tour import Tour, load_tour, save_tour, tour_cost, tour_cost_matrix
from regretgls.instance import distance_matrix


def test_canonical_starts_at_zero_and_fixes_direction():
    t = Tour(np.array([2, 3, 0, 1, 4]))
    c = t.canonical()
    assert c.order[0] == 0
    # Given the rotation [0, 1, 4, 2, 3], reversal puts the smaller neighbor second.
    assert list(c.order) == [0, 1, 4, 2, 3]
    rev = Tour(np.array([0, 3, 2, 4, 1]))
    assert list(rev.canonical().order) == [0, 1, 4, 2, 3]


def test_equality_is_rotation_and_reflection_invariant():
    a = Tour(np.array([0, 1, 2, 3, 4]))
    b = Tour(np.array([2, 3, 4, 0, 1]))
    c = Tour(np.array([0, 4, 3, 2, 1]))
    d = Tour(np.array([0, 2, 1, 3, 4]))
    assert a == b
    assert a == c
    assert a != d
    assert hash(a) == hash(b) == hash(c)
    assert len({a, b, c}) == 1


def test_edges_are_undirected():
    t = Tour(np.array([0, 2, 1, 3]))
    assert t.edges() == {(0, 2), (1, 2), (1, 3), (0, 3)}


def test_validate():
    Tour(np.array([0, 1, 2])).validate(3)
    with pytest.raises(ValueError):
        Tour(np.array([0, 1, 2])).validate(4)
    with pytest.raises(ValueError):
        Tour(np.array([0, 1, 1])).validate(3)
    with pytest.raises(ValueError):
        Tour(np.array([0, 1, 3])).validate(3)


def test_order_is_read_only():
    t = Tour(np.array([0, 1, 2]))
    with pytest.raises(ValueError):
        t.order[0] = 5


def test_tour_cost(square):
    perimeter = Tour(np.array([0, 1, 2, 3]))
    crossed = Tour(np.array([0, 2, 1, 3]))
    assert tour_cost(square, perimeter) == pytest.approx(4.0, abs=1e-12)
    assert tour_cost(square, crossed) == pytest.approx(2 + 2 * np.sqrt(2), abs=1e-12)


def test_tour_cost_matrix_agrees():
    inst = generate_random(9, seed=21)
    w = distance_matrix(inst)
    rng = np.random.default_rng(0)
    for _ in range(20):
        order = rng.permutation(9)
        t = Tour(order)
        assert tour_cost_matrix(w, t.order) == pytest.approx(
            tour_cost(inst, t), abs=1e-12
        )


def test_save_load_tour(tmp_path):
    t = Tour(np.array([0, 4, 2, 1, 3]))
    path = tmp_path / "t.tour"
    save_tour(t, 12.5, path)
    back, cost = load_tour(path)
    assert back == t
    assert cost == 12.5
