import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from udgp.instance import (Assignment, DistanceList, WeightedGraph, build_c60, complete_graph,
                           distances_from_realization, n_pairs, random_instance, thin,
                           true_assignment)

PHI = (1 + 5 ** 0.5) / 2


def truncated_icosahedron():
    """Independent construction: cut every icosahedron edge at its thirds."""
    ico = []
    for s1, s2 in itertools.product((1, -1), repeat=2):
        for k in range(3):
            v = np.roll([0.0, s1 * 1.0, s2 * PHI], k)
            ico.append(v)
    ico = np.array(ico)
    pts = []
    for a, b in itertools.permutations(range(12), 2):
        if abs(np.linalg.norm(ico[a] - ico[b]) - 2.0) < 1e-9:
            pts.append(ico[a] + (ico[b] - ico[a]) / 3)
    return np.array(pts) * 1.5  # edge 2/3 -> 1


def brute_sorted_dists(x):
    return np.sort([np.linalg.norm(x[i] - x[j]) for i, j in itertools.combinations(range(len(x)), 2)])


def test_c60_shape_and_counts():
    x = build_c60()
    assert x.shape == (60, 3)
    assert np.allclose(x.mean(axis=0), 0, atol=1e-12)
    d = brute_sorted_dists(x)
    assert d.size == 1770
    assert np.sum(np.abs(d - 1.0) <= 1e-9) == 90
    assert d[90] > 1.0 + 1e-3


def test_c60_matches_truncation_construction():
    ref = truncated_icosahedron()
    assert ref.shape == (60, 3)
    assert np.allclose(brute_sorted_dists(ref), brute_sorted_dists(build_c60()), atol=1e-9)
    # same orientation, so the point sets coincide too
    key = lambda a: a[np.lexsort(np.round(a, 9).T[::-1])]  # noqa: E731
    assert np.allclose(key(ref), key(build_c60()), atol=1e-9)


def test_c60_vertex_order_is_lexicographic():
    x = build_c60()
    order = np.lexsort(x.T[::-1])
    assert np.array_equal(order, np.arange(60))


@pytest.mark.parametrize("s", [2.0, 0.5, 1.4, 3.0])
def test_c60_scaling(s):
    # powers of two scale exactly; other factors agree to rounding
    a, b = s * build_c60(1.0), build_c60(s)
    if s in (2.0, 0.5):
        assert np.array_equal(a, b)
    assert np.allclose(a, b, rtol=0, atol=4 * np.finfo(float).eps * np.abs(b).max())


def test_distances_examples():
    assert np.array_equal(distances_from_realization([[0.0], [1.0]]).values, [1.0])
    sq = distances_from_realization([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert np.allclose(sq.values, [1, 1, 1, 1, 2 ** 0.5, 2 ** 0.5])
    assert distances_from_realization(build_c60()).m == 1770
    with pytest.raises(ValueError):
        distances_from_realization([[0.0, 0.0], [0.0, 0.0]])


@given(st.integers(2, 12), st.integers(1, 3), st.integers(0, 10**6))
def test_complete_list_size_and_truth(n, K, seed):
    x, delta = random_instance(n, K, seed)
    assert delta.m == n_pairs(n) == delta.N
    assert np.all(np.diff(delta.values) >= 0)
    d, alpha = true_assignment(x)
    p = alpha.pairs
    # generator realization satisfies every assigned distance
    assert np.allclose(np.linalg.norm(x[p[:, 0]] - x[p[:, 1]], axis=1), d.values, rtol=1e-14)


def test_random_instance_contract():
    x, d = random_instance(4, 2, seed=9)
    assert x.shape == (4, 2) and d.m == 6
    x2, d2 = random_instance(4, 2, seed=9)
    assert np.array_equal(x, x2) and d == d2
    assert np.all(np.abs(x) <= 1.0)
    got = brute_sorted_dists(x)
    assert np.array_equal(np.sort(d.values), got) or np.allclose(d.values, got, rtol=1e-15)


def test_random_instance_separation():
    x, _ = random_instance(40, 1, seed=3, box=1e-3)
    d = brute_sorted_dists(x)
    assert d.min() >= 1e-6 * 1e-3


def test_thin_density_one_and_determinism():
    _, delta = random_instance(6, 2, seed=1)
    assert thin(delta, 1.0, seed=4) == delta
    assert thin(delta, 0.4, seed=4) == thin(delta, 0.4, seed=4)


def test_thin_requires_complete_list():
    with pytest.raises(ValueError):
        thin(DistanceList(4, 2, [1.0, 2.0]), 0.5, 0)
    _, delta = random_instance(4, 2, seed=1)
    for p in (0.0, 1.5):
        with pytest.raises(ValueError):
            thin(delta, p, 0)


def test_thin_never_empty():
    _, delta = random_instance(3, 2, seed=1)
    for s in range(200):
        assert thin(delta, 0.01, s).m >= 1


def test_thin_keeps_a_submultiset():
    _, delta = random_instance(8, 2, seed=2)
    sub, keep = thin(delta, 0.5, 3, return_indices=True)
    assert np.array_equal(sub.values, delta.values[keep])


def test_thin_c60_half_is_binomial():
    delta = distances_from_realization(build_c60())
    sizes = np.array([thin(delta, 0.5, s).m for s in range(2000)])
    mean, sd = 885.0, np.sqrt(1770 * 0.25)
    assert abs(sizes.mean() - mean) <= 4 * sd / np.sqrt(sizes.size)
    assert abs(sizes.std() - sd) <= 0.1 * sd


def test_distance_list_validation():
    with pytest.raises(ValueError):
        DistanceList(3, 2, [1, 1, 1, 1])
    with pytest.raises(ValueError):
        DistanceList(3, 2, [1, 0])
    with pytest.raises(ValueError):
        DistanceList(1, 2, [1])
    with pytest.raises(ValueError):
        DistanceList(3, 2, [])
    d = DistanceList(3, 2, [3, 1, 2])
    assert np.array_equal(d.values, [1, 2, 3])
    with pytest.raises(ValueError):
        d.values[0] = 5


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph(3, [1], [0], [1.0])
    with pytest.raises(ValueError):
        WeightedGraph(3, [0, 0], [1, 1], [1.0, 2.0])
    with pytest.raises(ValueError):
        WeightedGraph(3, [0], [1], [-1.0])
    g = WeightedGraph.from_edges(3, [(2, 0, 1.5), (0, 1, 1.0)], K=2)
    assert g.edges() == [(0, 1, 1.0), (0, 2, 1.5)]
    A = g.adjacency()
    assert A[2, 0] == A[0, 2] == 1.5 and A[1, 2] == 0


def test_assignment_validation():
    a = Assignment(3, [[1, 0], [1, 2]])
    assert a[0] == (0, 1)
    with pytest.raises(ValueError):
        Assignment(3, [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        Assignment(3, [[0, 3]])
    with pytest.raises(ValueError):
        Assignment(3, [[1, 1]])


def test_complete_graph_of_c60():
    g = complete_graph(build_c60())
    assert g.num_edges == 1770 and g.K == 3
