import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from udgp.dgp import (LocalSettings, MultistartConfig, local_solve, multistart,
                      quartic_gradient, quartic_objective, start_point)
from udgp.instance import WeightedGraph, build_c60, complete_graph, random_instance
from udgp.metrics import mde

SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
SIDES = WeightedGraph.from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)], K=2)


def one_edge(d, K=1):
    return WeightedGraph(2, [0], [1], [d], K)


def random_graph(rng, n, K, p=0.7):
    x = rng.normal(size=(n, K))
    edges = [(i, j, float(np.linalg.norm(x[i] - x[j]) * rng.uniform(0.8, 1.2)))
             for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    if not edges:
        edges = [(0, 1, 1.0)]
    return WeightedGraph.from_edges(n, edges, K)


def fd_gradient(x, G, h=1e-6):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = h
        g[idx] = (quartic_objective(x + e, G) - quartic_objective(x - e, G)) / (2 * h)
    return g


def test_objective_examples():
    assert quartic_objective([[0.0], [1.0]], one_edge(2.0)) == 9.0
    assert quartic_objective(SQUARE, SIDES) == 0.0
    assert quartic_objective(SQUARE, complete_graph(SQUARE)) <= 1e-30
    x = build_c60()
    f = quartic_objective(x, complete_graph(x))
    scale = np.sum(complete_graph(x).d ** 4)
    assert f <= 1e-16 * scale


def test_gradient_examples():
    g = quartic_gradient([[0.0], [1.0]], one_edge(2.0))
    assert np.array_equal(g, [[12.0], [-12.0]])
    assert np.allclose(quartic_gradient(SQUARE, complete_graph(SQUARE)), 0, atol=1e-14)


def test_gradient_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n, K = int(rng.integers(2, 11)), int(rng.integers(1, 4))
        G = random_graph(rng, n, K)
        x = rng.normal(size=(n, K))
        ga, gf = quartic_gradient(x, G), fd_gradient(x, G)
        assert np.linalg.norm(ga - gf) <= 1e-5 * max(1.0, np.linalg.norm(gf))


@given(st.integers(0, 10**6))
def test_objective_rigid_motion_invariance(seed):
    rng = np.random.default_rng(seed)
    G = random_graph(rng, 6, 3)
    x = rng.normal(size=(6, 3))
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    y = x @ Q + rng.normal(size=3)
    f0 = quartic_objective(x, G)
    assert quartic_objective(y, G) == pytest.approx(f0, rel=1e-9, abs=1e-12)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        quartic_objective(np.zeros((3, 2)), one_edge(1.0))


def test_local_at_exact_point():
    r = local_solve(SIDES, SQUARE)
    assert r.f == 0.0 and r.converged and np.array_equal(r.x, SQUARE)


def test_local_one_dimensional():
    r = local_solve(one_edge(1.0), np.array([[0.0], [2.0]]))
    assert r.f <= 1e-12 and r.converged
    assert abs(abs(r.x[1, 0] - r.x[0, 0]) - 1.0) <= 1e-6


def test_local_unit_square_success_rate():
    G = complete_graph(SQUARE)
    cfg = MultistartConfig(seed=0)
    wins = sum(local_solve(G, start_point(G, cfg, k)).f < 1e-10 for k in range(100))
    assert wins > 50


@given(st.integers(0, 10**6))
def test_local_descent(seed):
    rng = np.random.default_rng(seed)
    G = random_graph(rng, 5, 2)
    x0 = rng.normal(size=(5, 2)) * 3
    r = local_solve(G, x0, LocalSettings(max_steps=50))
    assert r.f <= quartic_objective(x0, G)
    if r.converged:
        assert np.max(np.abs(quartic_gradient(r.x, G))) <= 1e-8 * (1 + r.f)


def test_local_reports_divergence():
    r = local_solve(one_edge(1.0), np.array([[0.0], [1e200]]))
    assert r.diverged and not r.converged


def test_multistart_square_and_determinism():
    G = complete_graph(SQUARE)
    a = multistart(G, MultistartConfig(iterations=10, seed=3))
    assert a.f < 1e-10
    b = multistart(G, MultistartConfig(iterations=10, seed=3))
    c = multistart(G, MultistartConfig(iterations=10, seed=3, workers=3))
    assert np.array_equal(a.x, b.x) and a.f == b.f
    assert np.array_equal(a.x, c.x) and a.f == c.f


def test_multistart_single_iteration_is_local_solve():
    x, _ = random_instance(5, 2, seed=1)
    G = complete_graph(x)
    cfg = MultistartConfig(iterations=1, seed=8)
    r = local_solve(G, start_point(G, cfg, 0))
    m = multistart(G, cfg)
    assert np.array_equal(m.x, r.x) and m.f == r.f


def test_multistart_monotone_in_iterations():
    rng = np.random.default_rng(4)
    G = random_graph(rng, 7, 2, p=0.9)
    short = LocalSettings(max_steps=200)
    fs = [multistart(G, MultistartConfig(iterations=k, seed=2, local=short)).f
          for k in (1, 2, 4, 8)]
    assert all(a >= b for a, b in zip(fs, fs[1:]))


def test_multistart_all_diverged():
    cfg = MultistartConfig(iterations=2, start_box=1e200)
    with pytest.raises(RuntimeError, match="diverged"):
        multistart(one_edge(1.0), cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        MultistartConfig(iterations=0)
    with pytest.raises(ValueError):
        MultistartConfig(start_box=0.0)


def test_start_box_defaults_to_largest_weight():
    G = WeightedGraph.from_edges(3, [(0, 1, 2.0), (1, 2, 5.0)], K=2)
    x = start_point(G, MultistartConfig(seed=1), 0)
    assert x.shape == (3, 2) and np.all(np.abs(x) <= 5.0)


def test_c60_complete_graph():
    x = build_c60()
    G = complete_graph(x)
    r = multistart(G, MultistartConfig(iterations=10, seed=0))
    assert mde(r.x, G) <= 1e-6
