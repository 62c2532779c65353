import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from udgp.linalg import (SPECTRAL_TOL, barvinok_realization, gershgorin_intervals,
                         gram_from_realization, is_dd, is_psd, pca_realization,
                         spectral_decompose, squared_distances_from_gram)


def sym(n, seed):
    A = np.random.default_rng(seed).normal(size=(n, n))
    return A + A.T


def random_dd(rng, n):
    A = rng.normal(size=(n, n))
    A = (A + A.T) / 2
    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A, np.abs(A).sum(axis=1) + rng.exponential(size=n))
    return A


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def sym_matrices(max_n=7):
    return st.integers(1, max_n).flatmap(
        lambda n: arrays(float, (n, n), elements=finite).map(lambda a: (a + a.T) / 2))


# spectral decomposition

def test_diagonal_input():
    dec = spectral_decompose(np.diag([3.0, 1.0]))
    assert np.allclose(dec.eigenvalues, [3, 1])
    assert np.allclose(np.abs(dec.eigenvectors), np.eye(2))


def test_two_by_two_by_hand():
    # characteristic polynomial (2 - l)^2 - 1 = 0 gives l = 3, 1
    dec = spectral_decompose([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(dec.eigenvalues, [3.0, 1.0])
    s = 1 / np.sqrt(2)
    assert np.allclose(np.abs(dec.eigenvectors[:, 0]), [s, s])
    v = dec.eigenvectors[:, 1]
    assert np.allclose(np.abs(v), [s, s]) and v[0] * v[1] < 0


def test_zero_matrix():
    dec = spectral_decompose(np.zeros((2, 2)))
    assert np.array_equal(dec.eigenvalues, [0.0, 0.0])


@pytest.mark.parametrize("bad", [[[np.nan, 0], [0, 1]], [[1, 2], [0, 1]], np.ones((2, 3))])
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        spectral_decompose(bad)


@pytest.mark.parametrize("n", [1, 2, 5, 12, 30])
def test_against_lapack(n):
    X = sym(n, n)
    dec = spectral_decompose(X)
    assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh(X)[::-1], atol=1e-9)


@given(sym_matrices())
def test_decomposition_invariants(X):
    dec = spectral_decompose(X)
    P, lam = dec.eigenvectors, dec.eigenvalues
    scale = max(np.linalg.norm(X), 1e-300)
    assert np.linalg.norm(dec.reconstruct() - X) <= 10 * SPECTRAL_TOL * scale + 1e-300
    assert np.linalg.norm(P.T @ P - np.eye(len(X))) <= 10 * SPECTRAL_TOL * len(X)
    assert np.all(np.diff(lam) <= 0)


def test_sign_convention_is_reproducible():
    X = sym(8, 3)
    P = spectral_decompose(X).eigenvectors
    lead = P[np.argmax(np.abs(P), axis=0), np.arange(8)]
    assert np.all(lead > 0)
    assert np.array_equal(P, spectral_decompose(X.copy()).eigenvectors)


# DD, Gershgorin, PSD

def test_dd_examples():
    assert is_dd(np.eye(3))
    assert not is_dd([[1, 2], [2, 1]])
    W = [[2, 1.5, 1.5], [1.5, 2, 1.5], [1.5, 1.5, 2]]
    assert not is_dd(W)
    assert is_psd(W)
    assert np.allclose(np.sort(np.linalg.eigvalsh(W)), [0.5, 0.5, 5.0])


def test_dd_boundary_is_exact():
    assert is_dd([[1.0, -1.0], [-1.0, 1.0]])
    assert not is_dd([[1.0, -1.0 - 1e-15], [-1.0 - 1e-15, 1.0]])


@pytest.mark.parametrize("n", [2, 3, 5])
def test_extreme_rays_are_dd(n):
    E = np.eye(n)
    for i in range(n):
        assert is_dd(np.outer(E[i], E[i]))
        for j in range(i + 1, n):
            for s in (1, -1):
                v = E[i] + s * E[j]
                assert is_dd(np.outer(v, v))


def test_dd_implies_psd(rng):
    for _ in range(200):
        assert is_psd(random_dd(rng, int(rng.integers(1, 9))), 1e-9)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.floats(0, 5), st.floats(0, 5))
def test_dd_cone_closed_under_conic_combination(n, seed, a, b):
    rng = np.random.default_rng(seed)
    A, B = random_dd(rng, n), random_dd(rng, n)
    # exact arithmetic would keep dominance; allow for rounding in the sum
    C = a * A + b * B
    d = np.diag(C)
    off = np.abs(C).sum(axis=1) - np.abs(d)
    assert np.all(d - off >= -1e-12 * (1 + np.abs(d)))


def test_gershgorin_examples():
    assert np.allclose(gershgorin_intervals([[2, 1], [1, 2]]), [[1, 3], [1, 3]])
    assert np.allclose(gershgorin_intervals([[5.0]]), [[5, 5]])
    assert np.allclose(gershgorin_intervals(np.eye(3)), [[1, 1]] * 3)


@given(sym_matrices())
def test_eigenvalues_inside_gershgorin_union(X):
    lam = spectral_decompose(X).eigenvalues
    iv = gershgorin_intervals(X)
    slack = 1e-9 * max(1.0, np.abs(X).max())
    for v in lam:
        assert np.any((iv[:, 0] - slack <= v) & (v <= iv[:, 1] + slack))


def test_psd_examples():
    assert is_psd(np.eye(2))
    assert not is_psd([[1, 2], [2, 1]])
    with pytest.raises(ValueError):
        is_psd(np.eye(2), tol=-1)


# extraction

def test_pca_diagonal():
    x = pca_realization(np.diag([4.0, 1.0, 0.0]), 2)
    assert np.allclose(np.abs(x), [[2, 0], [0, 1], [0, 0]])


def test_pca_rank_one():
    v = np.array([1.0, 2.0])
    x = pca_realization(np.outer(v, v), 1)
    assert np.allclose(np.abs(x[:, 0]), v)


def test_pca_recovers_square():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    sq -= sq.mean(axis=0)
    x = pca_realization(gram_from_realization(sq), 2)
    d = lambda a: np.sort(np.linalg.norm(a[:, None] - a[None], axis=2).ravel())  # noqa: E731
    assert np.allclose(d(x), d(sq))


def test_pca_pads_when_k_exceeds_n():
    x = pca_realization(np.eye(2), 3)
    assert x.shape == (2, 3) and np.all(x[:, 2] == 0)


def test_extraction_clamps_small_negatives_and_rejects_large():
    X = np.diag([1.0, -1e-12])
    assert np.all(np.isfinite(pca_realization(X, 2)))
    with pytest.raises(ValueError, match="not PSD"):
        pca_realization(np.diag([1.0, -1e-3]), 1)
    with pytest.raises(ValueError, match="not PSD"):
        barvinok_realization(np.diag([1.0, -1e-3]), 1, seed=0)


def test_pca_is_best_rank_k(rng):
    for n in (4, 6):
        F = rng.normal(size=(n, n))
        X = F @ F.T
        for K in range(1, n):
            x = pca_realization(X, K)
            err = np.linalg.norm(X - x @ x.T)
            for _ in range(100):
                Y = rng.normal(size=(n, K))
                assert err <= np.linalg.norm(X - Y @ Y.T) + 1e-9


@given(st.integers(2, 7), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_round_trip_preserves_distances(n, K, seed):
    x = np.random.default_rng(seed).uniform(-1, 1, size=(n, K))
    x -= x.mean(axis=0)
    y = pca_realization(gram_from_realization(x), K)
    D = lambda a: np.sort(np.linalg.norm(a[:, None] - a[None], axis=2).ravel())  # noqa: E731
    assert np.allclose(D(y), D(x), rtol=1e-7, atol=1e-7 * max(1.0, D(x).max()))


def test_barvinok_zero_and_shape():
    assert np.array_equal(barvinok_realization(np.zeros((3, 3)), 2, seed=5), np.zeros((3, 2)))
    F = np.random.default_rng(0).normal(size=(5, 5))
    x = barvinok_realization(F @ F.T, 3, seed=1)
    assert x.shape == (5, 3)
    assert np.array_equal(x, barvinok_realization(F @ F.T, 3, seed=1))
    assert not np.array_equal(x, barvinok_realization(F @ F.T, 3, seed=2))


def test_barvinok_second_moment_by_simulation():
    # With Z_ij ~ N(0, 1/K) one has E[Z Z^T] = K * (1/K) I = I, so the mean
    # of x x^T tends to X itself; a multiple of sqrt(K) would be wrong here.
    K, trials = 2, 10_000
    acc = np.zeros((2, 2))
    for s in range(trials):
        x = barvinok_realization(np.eye(2), K, seed=s)
        acc += x @ x.T
    mean = acc / trials
    assert np.linalg.norm(mean - np.eye(2)) < 0.05 * np.linalg.norm(np.eye(2))
    assert np.linalg.norm(mean - np.sqrt(K) * np.eye(2)) > 0.05 * np.linalg.norm(np.eye(2))


# Gram matrices

def test_gram_examples():
    assert np.array_equal(gram_from_realization([[1, 0], [0, 1]]), np.eye(2))
    assert np.array_equal(gram_from_realization([[1], [-1]]), [[1, -1], [-1, 1]])


@given(arrays(float, (5, 3), elements=finite))
def test_gram_distance_identity(x):
    D = squared_distances_from_gram(gram_from_realization(x))
    ref = np.sum((x[:, None] - x[None]) ** 2, axis=2)
    assert np.allclose(D, ref, atol=1e-9 * max(1.0, np.abs(x).max() ** 2))
