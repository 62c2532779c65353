"""Distance geometry on a weighted graph by multistart local minimization.

The objective is the quartic penalty

    f(x) = sum over edges {i,j} of (||x_i - x_j||^2 - d_ij^2)^2,

which vanishes exactly on realizations of the graph. Each start runs a
limited-memory BFGS descent with a backtracking (Armijo) line search.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_realization
from .rng import generator

log = logging.getLogger(__name__)


def _check(x, G):
    a = as_realization(x)
    if a.shape[0] != G.n:
        raise ValueError(f"realization has {a.shape[0]} rows, graph has {G.n} vertices")
    return a


def _residuals(a, G):
    diff = a[G.i] - a[G.j]
    return diff, np.einsum("ek,ek->e", diff, diff) - G.d * G.d


def quartic_objective(x, G):
    """Sum over edges of ``(||x_i - x_j||^2 - d_ij^2)^2``."""
    a = _check(x, G)
    _, e = _residuals(a, G)
    return float(e @ e)


def _gradient(a, G, diff, e):
    w = 4.0 * e[:, None] * diff
    g = np.empty_like(a)
    for k in range(a.shape[1]):
        g[:, k] = np.bincount(G.i, w[:, k], minlength=G.n) - np.bincount(
            G.j, w[:, k], minlength=G.n
        )
    return g


def quartic_gradient(x, G):
    """Analytic gradient: ``4 (||x_i - x_j||^2 - d_ij^2)(x_i - x_j)`` summed per vertex."""
    a = _check(x, G)
    diff, e = _residuals(a, G)
    return _gradient(a, G, diff, e)


def _value_and_grad(a, G):
    diff, e = _residuals(a, G)
    return float(e @ e), _gradient(a, G, diff, e)


@dataclass(frozen=True)
class LocalSettings:
    max_steps: int = 5000
    grad_tol: float = 1e-8
    memory: int = 10
    c1: float = 1e-4


@dataclass(frozen=True)
class LocalResult:
    x: np.ndarray
    f: float
    converged: bool
    diverged: bool = False
    steps: int = 0


def local_solve(G, x0, settings=LocalSettings()):
    """Local minimization of the quartic objective from ``x0``.

    Returns the final iterate with ``f <= f(x0)``. ``converged`` means the
    gradient sup-norm is at most ``grad_tol * (1 + f)``. A non-finite value
    aborts the run with ``diverged=True`` and returns the last finite iterate.
    """
    x = _check(x0, G).copy()
    shape = x.shape
    f, g = _value_and_grad(x, G)
    if not np.isfinite(f):
        return LocalResult(x, f, False, True, 0)
    S, Y = [], []

    def done(f, g):
        return f == 0.0 or np.max(np.abs(g)) <= settings.grad_tol * (1.0 + f)

    step = 0
    while step < settings.max_steps and not done(f, g):
        step += 1
        gv = g.ravel()
        # two-loop recursion
        q = gv.copy()
        alphas = []
        for s, y in zip(reversed(S), reversed(Y)):
            rho = 1.0 / (y @ s)
            a_ = rho * (s @ q)
            alphas.append((a_, rho, s, y))
            q -= a_ * y
        if S:
            q *= (S[-1] @ Y[-1]) / (Y[-1] @ Y[-1])
        else:
            q /= max(1.0, np.linalg.norm(gv))
        for a_, rho, s, y in reversed(alphas):
            b = rho * (y @ q)
            q += (a_ - b) * s
        d = -q
        slope = gv @ d
        if not slope < 0:
            S.clear()
            Y.clear()
            d = -gv / max(1.0, np.linalg.norm(gv))
            slope = gv @ d

        t = 1.0
        accepted = False
        for _ in range(60):
            xn = x + t * d.reshape(shape)
            fn, gn = _value_and_grad(xn, G)
            if np.isfinite(fn) and fn <= f + settings.c1 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if S:
                S.clear()
                Y.clear()
                continue
            break

        if not np.all(np.isfinite(gn)):
            return LocalResult(x, f, False, True, step)
        s = (xn - x).ravel()
        y = (gn - g).ravel()
        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            S.append(s)
            Y.append(y)
            if len(S) > settings.memory:
                S.pop(0)
                Y.pop(0)
        else:
            # curvature condition failed: restart from steepest descent
            S.clear()
            Y.clear()
        x, f, g = xn, fn, gn

    return LocalResult(x, f, bool(done(f, g)), False, step)


@dataclass(frozen=True)
class MultistartConfig:
    """Settings for :func:`multistart`.

    ``start_box`` defaults to the largest edge weight of the graph. When
    ``stop_below`` is set, the remaining starts are skipped once a start
    reaches an objective at or below it.
    """

    iterations: int = 10
    seed: int = 0
    start_box: float = None
    K: int = None
    local: LocalSettings = field(default_factory=LocalSettings)
    workers: int = 1
    stop_below: float = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.start_box is not None and not self.start_box > 0:
            raise ValueError("start_box must be positive")


@dataclass(frozen=True)
class MultistartResult:
    x: np.ndarray
    f: float
    best_start: int
    runs: tuple = ()


def start_point(G, cfg, k):
    """Uniform start ``k`` in ``[-r, r]^{n x K}`` from the stream ``(seed, k)``."""
    K = cfg.K if cfg.K is not None else G.K
    r = cfg.start_box
    if r is None:
        r = float(np.max(G.d)) if G.num_edges else 1.0
    return generator(cfg.seed, k).uniform(-r, r, size=(G.n, K))


def multistart(G, cfg=MultistartConfig()):
    """Best local minimum over ``cfg.iterations`` independent seeded starts.

    Ties in the objective go to the lowest start index, so the result does not
    depend on ``cfg.workers``.
    """

    def run(k):
        return local_solve(G, start_point(G, cfg, k), cfg.local)

    runs = []
    if cfg.workers > 1 and cfg.stop_below is None:
        with ThreadPoolExecutor(cfg.workers) as ex:
            runs = list(ex.map(run, range(cfg.iterations)))
    else:
        for k in range(cfg.iterations):
            res = run(k)
            runs.append(res)
            log.debug("start %d: f=%.3e converged=%s steps=%d", k, res.f, res.converged, res.steps)
            if cfg.stop_below is not None and not res.diverged and res.f <= cfg.stop_below:
                break

    ok = [(r.f, k) for k, r in enumerate(runs) if not r.diverged and np.isfinite(r.f)]
    if not ok:
        detail = "; ".join(f"start {k}: f={r.f}" for k, r in enumerate(runs))
        raise RuntimeError(f"all multistart runs diverged ({detail})")
    f, k = min(ok)
    summary = tuple((r.f, r.converged, r.diverged) for r in runs)
    return MultistartResult(runs[k].x, f, k, summary)
