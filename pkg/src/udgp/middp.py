"""Mixed-integer diagonally dominant encoding of the UDGP, evaluators and an exact oracle.

The Gram matrix ``X`` of the unknown realization is linearized, squared
distances become ``X_ii + X_jj - 2 X_ij``, and PSD-ness of ``X`` is replaced
by diagonal dominance, which is polyhedral::

    min   sum z+ + z-
    s.t.  -z-_{ijl} - M(1 - y_{ijl}) <= X_ii + X_jj - 2 X_ij - delta_l^2 <= z+_{ijl} + M(1 - y_{ijl})
          sum_{i<j} y_{ijl} = 1                    for every l
          sum_l y_{ijl} <= 1                       for every pair
          X_ii >= sum_{j != i} T_ij                for every i
          -T_ij <= X_ij <= T_ij
          y binary, z >= 0

Diagonal entries of ``X`` live in ``[0, M]``, off-diagonal entries of ``X``
in ``[-M, M]`` and ``T`` in ``[0, M]``. Only off-diagonal ``T`` is created.

Two optional reformulations exist. ``group_multiplicities`` folds equal
distance values into one index whose assignment row has the multiplicity as
right-hand side. ``sym_break`` orders the pairs given to consecutive equal
values.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dgp import MultistartConfig, multistart
from .instance import Assignment, DistanceList, WeightedGraph, n_pairs, pair_arrays
from .linalg import as_realization, gram_from_realization
from .milp import MilpModel
from .milp.bnb import INT_TOL

log = logging.getLogger(__name__)

BIG_M_VARIANTS = ("prop22", "experimental")

# enumeration guard of the exact oracle
ORACLE_MAX_N = 5
ORACLE_MAX_M = 10


def big_m(delta, variant="experimental"):
    """``(sum delta)^2`` for ``prop22``, ``sum delta^2`` for ``experimental``."""
    v = np.asarray(delta.values, dtype=float)
    if variant == "prop22":
        return float(np.sum(v)) ** 2
    if variant == "experimental":
        return float(np.sum(v * v))
    raise ValueError(f"unknown big-M variant {variant!r}; use one of {BIG_M_VARIANTS}")


def value_groups(delta, group_multiplicities=False, rtol=1e-9):
    """Distance indices used by the model.

    Returns ``(values, counts, members)``: one entry per model index, with
    ``members[g]`` the original positions of the list covered by index ``g``.
    When grouping, sorted values within ``rtol`` of the first value of a run
    count as equal (generated lists carry rounding noise); the group's value
    is the mean of its members.
    """
    v = np.asarray(delta.values)
    if not group_multiplicities:
        return v.copy(), np.ones(v.size, np.int64), [np.array([l]) for l in range(v.size)]
    starts = [0]
    for l in range(1, v.size):
        if v[l] - v[starts[-1]] > rtol * v[starts[-1]]:
            starts.append(l)
    bounds = starts + [v.size]
    members = [np.arange(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    vals = np.array([v[idx].mean() for idx in members])
    counts = np.array([idx.size for idx in members], np.int64)
    return vals, counts, members


def middp_size(n, m, groups=None):
    """Closed-form variable and row counts of the encoding.

    ``groups`` is the number of distinct model indices (defaults to ``m``,
    the literal formulation). Nothing is allocated, so this works at any size.
    """
    N = n_pairs(n)
    L = m if groups is None else groups
    c = {
        "binaries": N * L,
        "slacks": 2 * N * L,
        "x_entries": n + N,
        "t_entries": N,
        "sandwich_rows": 2 * N * L,
        "assignment_rows": L,
        "pair_rows": N,
        "dd_rows": n,
        "envelope_rows": 2 * N,
    }
    c["variables"] = c["binaries"] + c["slacks"] + c["x_entries"] + c["t_entries"]
    c["rows"] = (c["sandwich_rows"] + c["assignment_rows"] + c["pair_rows"]
                 + c["dd_rows"] + c["envelope_rows"])
    return c


@dataclass(frozen=True, eq=False)
class MiddpEncoding:
    """The model plus the maps from roles to variable indices.

    ``y``, ``zp`` and ``zm`` are ``N x L`` index arrays (pair by model index),
    ``x_diag`` has length ``n``; ``x_off`` and ``t`` have length ``N``.
    """

    model: MilpModel
    delta: DistanceList
    M: float
    values: np.ndarray
    counts: np.ndarray
    members: list = field(repr=False)
    pi: np.ndarray = field(repr=False)
    pj: np.ndarray = field(repr=False)
    x_diag: np.ndarray = field(repr=False)
    x_off: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    zp: np.ndarray = field(repr=False)
    zm: np.ndarray = field(repr=False)
    sym_break_rows: int = 0

    @property
    def n(self):
        return self.delta.n

    @property
    def N(self):
        return self.pi.size

    @property
    def L(self):
        return self.values.size

    def counts_summary(self):
        c = middp_size(self.n, self.delta.m, self.L)
        c["sym_break_rows"] = self.sym_break_rows
        c["rows"] += self.sym_break_rows
        return c

    def role_of(self, k):
        """``(role, indices)`` of variable ``k``; vertex indices are 0-based."""
        n, N, L = self.n, self.N, self.L
        if k < n:
            return "X", (k, k)
        k -= n
        if k < N:
            return "X", (int(self.pi[k]), int(self.pj[k]))
        k -= N
        if k < N:
            return "T", (int(self.pi[k]), int(self.pj[k]))
        k -= N
        for role in ("y", "z+", "z-"):
            if k < N * L:
                p, g = divmod(k, L)
                return role, (int(self.pi[p]), int(self.pj[p]), g)
            k -= N * L
        raise IndexError("variable index out of range")

    def index_of(self, role, *idx):
        """Inverse of :meth:`role_of`."""
        if role == "X":
            i, j = sorted(idx)
            return int(self.x_diag[i]) if i == j else int(self.x_off[self._pair(i, j)])
        if role == "T":
            return int(self.t[self._pair(*sorted(idx[:2]))])
        arr = {"y": self.y, "z+": self.zp, "z-": self.zm}[role]
        i, j, g = idx
        return int(arr[self._pair(min(i, j), max(i, j)), g])

    def _pair(self, i, j):
        n = self.n
        return i * n - i * (i + 1) // 2 + (j - i - 1)

    def split(self, x):
        """Named views of a full variable vector."""
        x = np.asarray(x, dtype=float)
        X = np.zeros((self.n, self.n))
        X[np.arange(self.n), np.arange(self.n)] = x[self.x_diag]
        X[self.pi, self.pj] = x[self.x_off]
        X[self.pj, self.pi] = x[self.x_off]
        T = np.zeros((self.n, self.n))
        T[self.pi, self.pj] = x[self.t]
        T[self.pj, self.pi] = x[self.t]
        return {"X": X, "T": T, "y": x[self.y], "z+": x[self.zp], "z-": x[self.zm]}


def build_middp(delta, M=None, sym_break=False, group_multiplicities=False, names=True):
    """Assemble the MIDDP model for ``delta``.

    Parameters
    ----------
    delta : DistanceList
    M : float, optional
        Big-M constant; defaults to ``big_m(delta, "experimental")``.
    sym_break : bool
        Add ordering rows for consecutive equal values (literal model only).
    group_multiplicities : bool
        Fold equal values into one index with a count right-hand side.
    names : bool
        Attach readable variable names (``X_1_2``, ``y_1_2_3``, ...).
    """
    if M is None:
        M = big_m(delta)
    if not M > 0:
        raise ValueError("big-M must be positive")
    n = delta.n
    pi, pj = pair_arrays(n)
    N = pi.size
    vals, counts, members = value_groups(delta, group_multiplicities)
    L = vals.size

    x_diag = np.arange(n)
    x_off = n + np.arange(N)
    t = n + N + np.arange(N)
    base = n + 2 * N
    y = base + np.arange(N * L).reshape(N, L)
    zp = y + N * L
    zm = zp + N * L
    nv = base + 3 * N * L

    lb = np.zeros(nv)
    ub = np.full(nv, M)
    lb[x_off] = -M
    ub[y] = 1.0
    ub[zp] = np.inf
    ub[zm] = np.inf
    integer = np.zeros(nv, bool)
    integer[y.ravel()] = True
    c = np.zeros(nv)
    c[zp.ravel()] = 1.0
    c[zm.ravel()] = 1.0

    rows, cols, data, sense, rhs = [], [], [], [], []
    r0 = 0

    def block(r, cidx, v):
        rows.append(np.asarray(r).ravel())
        cols.append(np.asarray(cidx).ravel())
        data.append(np.broadcast_to(np.asarray(v, dtype=float), np.shape(r)).ravel())

    # sandwich rows, one upper and one lower per (pair, index)
    P, G = np.meshgrid(np.arange(N), np.arange(L), indexing="ij")
    P, G = P.ravel(), G.ravel()
    d2 = vals[G] ** 2
    for side in (+1, -1):
        r = r0 + np.arange(N * L)
        block(r, x_diag[pi[P]], 1.0)
        block(r, x_diag[pj[P]], 1.0)
        block(r, x_off[P], -2.0)
        if side > 0:
            block(r, zp[P, G], -1.0)
            block(r, y[P, G], M)
            sense += ["<="] * (N * L)
            rhs.append(d2 + M)
        else:
            block(r, zm[P, G], 1.0)
            block(r, y[P, G], -M)
            sense += [">="] * (N * L)
            rhs.append(d2 - M)
        r0 += N * L

    # assignment rows
    r = r0 + np.repeat(np.arange(L), N)
    block(r, y.T, 1.0)
    sense += ["=="] * L
    rhs.append(counts.astype(float))
    r0 += L

    # at most one index per pair
    r = r0 + np.repeat(np.arange(N), L)
    block(r, y, 1.0)
    sense += ["<="] * N
    rhs.append(np.zeros(N) + 1.0)
    r0 += N

    # diagonal dominance
    block(r0 + np.arange(n), x_diag, 1.0)
    block(r0 + pi, t, -1.0)
    block(r0 + pj, t, -1.0)
    sense += [">="] * n
    rhs.append(np.zeros(n))
    r0 += n

    # -T <= X <= T
    for s in (1.0, -1.0):
        r = r0 + np.arange(N)
        block(r, x_off, s)
        block(r, t, -1.0)
        sense += ["<="] * N
        rhs.append(np.zeros(N))
        r0 += N

    n_sym = 0
    if sym_break and not group_multiplicities:
        weight = np.arange(1, N + 1, dtype=float)
        for l in range(L - 1):
            if vals[l + 1] - vals[l] <= 1e-9 * vals[l]:
                block(np.full(N, r0), y[:, l + 1], weight)
                block(np.full(N, r0), y[:, l], -weight)
                sense.append(">=")
                rhs.append(np.array([1.0]))
                r0 += 1
                n_sym += 1

    A = sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(r0, nv))
    var_names = None
    if names:
        var_names = [f"X_{i + 1}_{i + 1}" for i in range(n)]
        var_names += [f"X_{a + 1}_{b + 1}" for a, b in zip(pi, pj)]
        var_names += [f"T_{a + 1}_{b + 1}" for a, b in zip(pi, pj)]
        for role in ("y", "zp", "zm"):
            var_names += [f"{role}_{a + 1}_{b + 1}_{g + 1}" for a, b in zip(pi, pj)
                          for g in range(L)]
        var_names = tuple(var_names)
    model = MilpModel(c, A, np.array(sense, dtype=object), np.concatenate(rhs), lb, ub,
                      integer, var_names)
    log.info("MIDDP: n=%d m=%d indices=%d vars=%d rows=%d binaries=%d M=%.6g",
             n, delta.m, L, nv, r0, N * L, M)
    return MiddpEncoding(model, delta, float(M), vals, counts, members, pi, pj,
                         x_diag, x_off, t, y, zp, zm, n_sym)


def extract_assignment(enc, sol, int_tol=INT_TOL):
    """Read the assignment off the binaries of an incumbent.

    With grouped multiplicities the pairs chosen for one index are handed to
    the list positions of that value in pair order.
    """
    x = getattr(sol, "x", sol)
    if x is None:
        raise ValueError("solution has no incumbent")
    yv = np.asarray(x, dtype=float)[enc.y]
    if yv.size and np.max(np.abs(yv - np.round(yv))) > int_tol:
        raise ValueError("incumbent violates integrality")
    on = yv > 0.5
    pairs = np.empty((enc.delta.m, 2), np.int64)
    for g, pos in enumerate(enc.members):
        chosen = np.flatnonzero(on[:, g])
        if chosen.size != pos.size:
            raise ValueError(f"index {g + 1} is assigned {chosen.size} pairs, expected {pos.size}")
        pairs[pos, 0] = enc.pi[chosen]
        pairs[pos, 1] = enc.pj[chosen]
    return Assignment(enc.n, pairs)


def assignment_to_graph(alpha, delta):
    """Weighted graph with edge ``alpha(l)`` of weight ``delta_l``."""
    if alpha.m != delta.m or alpha.n != delta.n:
        raise ValueError("assignment and distance list disagree in size")
    p = alpha.pairs
    return WeightedGraph(delta.n, p[:, 0], p[:, 1], delta.values, delta.K)


def _assigned_sq(x, alpha):
    a = as_realization(x)
    p = alpha.pairs
    return np.sum((a[p[:, 0]] - a[p[:, 1]]) ** 2, axis=1)


def evaluate_minlp_objective(x, alpha, delta):
    """``sum_l (||x_i - x_j||^2 - delta_l^2)^2`` over ``{i, j} = alpha(l)``."""
    r = _assigned_sq(x, alpha) - np.asarray(delta.values) ** 2
    return float(np.sum(r * r))


def evaluate_sandwich_residuals(x, alpha, delta):
    """Minimal slacks ``(z-, z+)`` per list position, as an ``m x 2`` array."""
    r = _assigned_sq(x, alpha) - np.asarray(delta.values) ** 2
    return np.column_stack([np.maximum(0.0, -r), np.maximum(0.0, r)])


def gram_point(enc, x, alpha):
    """Full variable vector built from a realization and an assignment.

    ``X`` is the Gram matrix of the centered realization plus the smallest
    multiple ``s`` of the identity making it diagonally dominant. The shift
    raises every ``X_ii + X_jj - 2 X_ij`` by ``2 s``, so the assigned rows
    need slack ``z+ = 2 s``; only a Gram matrix that is already dominant
    gives zero slack. ``T = |X|`` off the diagonal, ``y`` follows ``alpha``
    and the slacks are the smallest admissible ones. This is a testing
    device; the solve path does not use it.
    """
    a = as_realization(x)
    a = a - a.mean(axis=0)
    X = gram_from_realization(a)
    off = np.abs(X).sum(axis=1) - np.abs(np.diag(X))
    X = X + max(0.0, float(np.max(off - np.diag(X)))) * np.eye(enc.n)
    v = np.zeros(enc.model.num_vars)
    v[enc.x_diag] = np.diag(X)
    v[enc.x_off] = X[enc.pi, enc.pj]
    v[enc.t] = np.abs(X[enc.pi, enc.pj])
    g_of = np.empty(enc.delta.m, np.int64)
    for g, pos in enumerate(enc.members):
        g_of[pos] = g
    p_of = {(a_, b_): k for k, (a_, b_) in enumerate(zip(enc.pi.tolist(), enc.pj.tolist()))}
    for l, (i, j) in enumerate(alpha.pairs.tolist()):
        v[enc.y[p_of[(i, j)], g_of[l]]] = 1.0
    sq = np.diag(X)[enc.pi] + np.diag(X)[enc.pj] - 2 * X[enc.pi, enc.pj]
    r = sq[:, None] - enc.values[None, :] ** 2
    slack = np.where(v[enc.y] > 0.5, 0.0, enc.M)
    v[enc.zp] = np.maximum(0.0, r - slack)
    v[enc.zm] = np.maximum(0.0, -r - slack)
    return v


def _default_dgp_solver(K):
    cfg = MultistartConfig(iterations=10, seed=0, K=K, stop_below=1e-20)

    def solve(G):
        res = multistart(G, cfg)
        return res.x, res.f

    return solve


def _realizable_complete(D2, K, tol=1e-7):
    """Classical scaling test: is the squared distance matrix Euclidean in ``R^K``?"""
    n = D2.shape[0]
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ D2 @ J
    ev = np.linalg.eigvalsh(B)[::-1]
    scale = max(1.0, float(np.max(np.abs(ev))))
    return ev[-1] >= -tol * scale and (K >= n or np.all(np.abs(ev[K:]) <= tol * scale))


def brute_force_udgp(delta, dgp_solver=None, zero_tol=1e-12):
    """Exact UDGP oracle by enumeration of assignments (tiny instances only).

    Assignments are enumerated up to vertex relabeling: the largest value is
    always placed on the pair ``{1, 2}``. Candidates passing the triangle
    inequality (and, for complete lists, a classical-scaling realizability
    test) are tried first; the first whose DGP reaches ``zero_tol`` certifies
    a global minimum of zero. Otherwise every assignment is solved and the
    smallest objective wins, ties going to the lexicographically smallest
    assignment.

    Returns
    -------
    (Assignment, ndarray, float)
    """
    n, m = delta.n, delta.m
    if n > ORACLE_MAX_N or m > ORACLE_MAX_M:
        raise ValueError("instance too large for oracle "
                         f"(n={n}, m={m}; limits n<={ORACLE_MAX_N}, m<={ORACLE_MAX_M})")
    solver = dgp_solver or _default_dgp_solver(delta.K)
    vals, counts, members = value_groups(delta, True)
    pi, pj = pair_arrays(n)
    N = pi.size
    pid = {(a, b): k for k, (a, b) in enumerate(zip(pi.tolist(), pj.tolist()))}
    tri = [(pid[(a, b)], pid[(a, c)], pid[(b, c)])
           for a, b, c in itertools.combinations(range(n), 3)]
    tri_at = [[t for t in tri if max(t) == p] for p in range(N)]
    none = N - m

    def leaves(screen):
        label = np.full(N, -1)
        left = counts.copy()
        top = vals.size - 1
        label[0] = top
        left[top] -= 1

        def ok(p):
            if not screen:
                return True
            for t in tri_at[p]:
                if min(label[list(t)]) < 0:
                    continue
                s = sorted(vals[label[list(t)]])
                if s[2] > s[0] + s[1] + 1e-9 * s[2]:
                    return False
            return True

        def rec(p, free):
            if p == N:
                yield label.copy()
                return
            for g in range(vals.size - 1, -1, -1):
                if left[g]:
                    label[p] = g
                    left[g] -= 1
                    if ok(p):
                        yield from rec(p + 1, free)
                    left[g] += 1
            if free:
                label[p] = -1
                yield from rec(p + 1, free - 1)
            label[p] = -1

        if ok(0):
            yield from rec(1, none)

    def to_assignment(lab):
        pairs = np.empty((m, 2), np.int64)
        for g, pos in enumerate(members):
            chosen = np.flatnonzero(lab == g)
            pairs[pos, 0] = pi[chosen]
            pairs[pos, 1] = pj[chosen]
        return Assignment(n, pairs)

    def run(lab):
        alpha = to_assignment(lab)
        x, f = solver(assignment_to_graph(alpha, delta))
        return alpha, np.asarray(x), float(f)

    scale = max(1.0, float(np.max(delta.values)) ** 4)
    for lab in leaves(screen=True):
        if m == N:
            D2 = np.zeros((n, n))
            D2[pi, pj] = vals[lab] ** 2
            D2 = D2 + D2.T
            if not _realizable_complete(D2, delta.K):
                continue
        alpha, x, f = run(lab)
        if f <= zero_tol * scale:
            return alpha, x, f

    best = None
    for lab in leaves(screen=False):
        alpha, x, f = run(lab)
        key = (f, alpha.pairs.ravel().tolist())
        if best is None or key < best[0]:
            best = (key, alpha, x, f)
    return best[1], best[2], best[3]


def check_big_m(enc, x):
    """Largest ``|X_ii + X_jj - 2 X_ij - delta_l^2|`` over all pairs and values at the
    Gram point of the centered realization ``x``, and whether it is within ``M``."""
    a = as_realization(x)
    a = a - a.mean(axis=0)
    X = gram_from_realization(a)
    sq = X[enc.pi, enc.pi] + X[enc.pj, enc.pj] - 2 * X[enc.pi, enc.pj]
    worst = float(np.max(np.abs(sq[:, None] - enc.values[None, :] ** 2)))
    return worst, worst <= enc.M


__all__ = [
    "BIG_M_VARIANTS", "MiddpEncoding", "assignment_to_graph", "big_m", "brute_force_udgp",
    "build_middp", "check_big_m", "evaluate_minlp_objective", "evaluate_sandwich_residuals",
    "extract_assignment", "gram_point", "middp_size", "value_groups",
]
