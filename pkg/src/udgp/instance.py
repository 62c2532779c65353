"""UDGP and DGP instances: distance lists, weighted graphs, assignments, generators.

Vertices are 0-based in memory and 1-based in files (see :mod:`udgp.fileio`).
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_realization
from .rng import generator


def n_pairs(n):
    """Number of unordered vertex pairs ``N = n(n-1)/2``."""
    return n * (n - 1) // 2


def pair_arrays(n):
    """Row-major ``(i, j)`` index arrays of all pairs ``i < j``."""
    i, j = np.triu_indices(n, k=1)
    return i.astype(np.int64), j.astype(np.int64)


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DistanceList:
    """Multiset of ``m`` positive distance values for ``n`` points in ``R^K``.

    Values are stored sorted ascending.
    """

    n: int
    K: int
    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.K < 1:
            raise ValueError("need K >= 1")
        if v.size < 1 or v.size > n_pairs(self.n):
            raise ValueError(f"m={v.size} must lie in [1, {n_pairs(self.n)}]")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("distance values must be positive and finite")
        object.__setattr__(self, "values", _frozen(v, float))

    @property
    def m(self):
        return int(self.values.size)

    @property
    def N(self):
        return n_pairs(self.n)

    @property
    def complete(self):
        return self.m == self.N

    def __eq__(self, other):
        if not isinstance(other, DistanceList):
            return NotImplemented
        return (self.n, self.K) == (other.n, other.K) and np.array_equal(
            self.values, other.values
        )

    def __len__(self):
        return self.m


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Simple undirected graph on ``n`` vertices with positive edge weights.

    Edges are held as parallel arrays ``i < j`` sorted lexicographically.
    ``K`` is the embedding dimension carried along with the graph.
    """

    n: int
    i: np.ndarray
    j: np.ndarray
    d: np.ndarray
    K: int = 3

    def __post_init__(self):
        i = np.asarray(self.i, dtype=np.int64).ravel()
        j = np.asarray(self.j, dtype=np.int64).ravel()
        d = np.asarray(self.d, dtype=float).ravel()
        if not (i.size == j.size == d.size):
            raise ValueError("edge arrays differ in length")
        if np.any(i < 0) or np.any(j >= self.n) or np.any(i >= j):
            raise ValueError("edges must satisfy 0 <= i < j < n")
        if not np.all(np.isfinite(d)) or np.any(d <= 0):
            raise ValueError("edge weights must be positive and finite")
        order = np.lexsort((j, i))
        i, j, d = i[order], j[order], d[order]
        if i.size > 1 and np.any((i[1:] == i[:-1]) & (j[1:] == j[:-1])):
            raise ValueError("duplicate edge")
        object.__setattr__(self, "i", _frozen(i, np.int64))
        object.__setattr__(self, "j", _frozen(j, np.int64))
        object.__setattr__(self, "d", _frozen(d, float))

    @classmethod
    def from_edges(cls, n, edges, K=3):
        """Build from an iterable of ``(i, j, d)`` with either vertex order."""
        edges = list(edges)
        if not edges:
            return cls(n, [], [], [], K)
        a = np.array([[min(e[0], e[1]), max(e[0], e[1])] for e in edges], dtype=np.int64)
        w = np.array([e[2] for e in edges], dtype=float)
        return cls(n, a[:, 0], a[:, 1], w, K)

    @property
    def num_edges(self):
        return int(self.d.size)

    def edges(self):
        return list(zip(self.i.tolist(), self.j.tolist(), self.d.tolist()))

    def adjacency(self):
        """Dense symmetric weighted adjacency matrix; absent edges are 0."""
        W = np.zeros((self.n, self.n))
        W[self.i, self.j] = self.d
        W[self.j, self.i] = self.d
        return W

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.K == other.K
            and np.array_equal(self.i, other.i)
            and np.array_equal(self.j, other.j)
            and np.array_equal(self.d, other.d)
        )


@dataclass(frozen=True, eq=False)
class Assignment:
    """Map from distance index ``l`` to the vertex pair ``pairs[l] = (i, j)``.

    Total by construction (one row per distance) and injective: no pair is
    used twice.
    """

    n: int
    pairs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        p = np.sort(p, axis=1)
        if np.any(p[:, 0] < 0) or np.any(p[:, 1] >= self.n) or np.any(p[:, 0] == p[:, 1]):
            raise ValueError("assigned pairs must satisfy 0 <= i < j < n")
        if len({(a, b) for a, b in p.tolist()}) != len(p):
            raise ValueError("assignment is not injective: a pair is used twice")
        object.__setattr__(self, "pairs", _frozen(p, np.int64))

    @property
    def m(self):
        return int(self.pairs.shape[0])

    def __getitem__(self, l):
        a, b = self.pairs[l]
        return int(a), int(b)

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.pairs, other.pairs)


def _truncated_icosahedron_edge2():
    """The 60 vertices with edge length 2: even permutations of three seeds."""
    phi = (1.0 + 5.0 ** 0.5) / 2.0
    seeds = [
        (0.0, 1.0, 3.0 * phi),
        (1.0, 2.0 + phi, 2.0 * phi),
        (phi, 2.0, phi ** 3),
    ]
    even = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    pts = set()
    for s in seeds:
        for signs in itertools.product((1.0, -1.0), repeat=3):
            v = tuple(a * b for a, b in zip(s, signs))
            for perm in even:
                pts.add(tuple(v[k] + 0.0 for k in perm))
    return np.array(sorted(pts))


def build_c60(edge_length=1.0):
    """Buckminsterfullerene as the ideal truncated icosahedron.

    Returns a ``(60, 3)`` realization centered at the origin, all 90 edges of
    length ``edge_length``, rows sorted lexicographically by coordinates.
    """
    if not edge_length > 0:
        raise ValueError("edge_length must be positive")
    base = _truncated_icosahedron_edge2() / 2.0
    x = base * float(edge_length)
    return x[np.lexsort(x.T[::-1])]


def pairwise_distances(x):
    """Distances of all pairs ``i < j`` in row-major pair order."""
    a = as_realization(x)
    i, j = pair_arrays(a.shape[0])
    return np.linalg.norm(a[i] - a[j], axis=1)


def distances_from_realization(x, K=None):
    """Complete sorted distance list of a realization.

    Raises ``ValueError`` when two points coincide.
    """
    a = as_realization(x)
    n = a.shape[0]
    if n < 2:
        raise ValueError("need at least two points")
    d = pairwise_distances(a)
    if np.any(d <= 0):
        raise ValueError("coincident points give a zero distance")
    return DistanceList(n, a.shape[1] if K is None else K, d)


def true_assignment(x):
    """Complete list of ``x`` together with the assignment that generated it.

    Equal values are matched to pairs in row-major pair order.
    """
    a = as_realization(x)
    i, j = pair_arrays(a.shape[0])
    d = np.linalg.norm(a[i] - a[j], axis=1)
    order = np.argsort(d, kind="stable")
    delta = DistanceList(a.shape[0], a.shape[1], d)
    return delta, Assignment(a.shape[0], np.column_stack([i[order], j[order]]))


def complete_graph(x, K=None):
    """Weighted complete graph whose weights are the distances of ``x``."""
    a = as_realization(x)
    i, j = pair_arrays(a.shape[0])
    d = np.linalg.norm(a[i] - a[j], axis=1)
    return WeightedGraph(a.shape[0], i, j, d, a.shape[1] if K is None else K)


def thin(delta, density, seed, return_indices=False):
    """Erdos-Renyi thinning: keep each value independently with prob. ``density``.

    Only complete lists may be thinned. An empty draw is redrawn from the same
    stream, so the result always has at least one value.
    """
    if not delta.complete:
        raise ValueError(f"thin needs a complete list (m={delta.m}, N={delta.N})")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = generator(seed)
    while True:
        keep = np.flatnonzero(rng.random(delta.m) < density)
        if keep.size:
            break
    out = DistanceList(delta.n, delta.K, delta.values[keep])
    return (out, keep) if return_indices else out


def random_instance(n, K, seed, box=1.0):
    """Uniform random points in ``[-box, box]^K`` and their complete list.

    Points closer than ``1e-6 * box`` to an earlier point are redrawn.
    """
    if n < 2 or K < 1:
        raise ValueError("need n >= 2 and K >= 1")
    if not box > 0:
        raise ValueError("box must be positive")
    rng = generator(seed)
    x = rng.uniform(-box, box, size=(n, K))
    while True:
        d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
        close = np.triu(d < 1e-6 * box, k=1)
        bad = np.unique(np.nonzero(close)[1])
        if bad.size == 0:
            break
        x[bad] = rng.uniform(-box, box, size=(bad.size, K))
    return x, distances_from_realization(x)
