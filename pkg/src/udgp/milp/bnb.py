"""LP-based branch-and-bound.

Node selection is best-bound: the open node with the smallest relaxation
bound is taken from a heap and then plunged depth-first (rounding direction
first) until the LP is integral, infeasible or pruned. The sibling of every
dive step goes to the heap together with the parent's basis, so reopening it
needs one refactorization and usually a few pivots. Branching picks the most
fractional integer variable, lowest index on ties.

Limits (node count, wall clock) are checked between nodes. When a limit fires
the best incumbent found so far is returned with status ``FeasibleLimit``.
"""

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .heuristics import shift_repair
from .model import is_feasible
from .simplex import DenseSimplex, LPStatus, LPTooLarge, check_dense_size, presolve_fixed

log = logging.getLogger(__name__)

INT_TOL = 1e-6
FEAS_TOL = 1e-7
GAP_TOL = 1e-6


class Status(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE_LIMIT = "FeasibleLimit"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "UnboundedRelaxation"


@dataclass
class MilpSolution:
    """Outcome of :func:`solve`.

    ``x`` is ``None`` when no incumbent is known; with ``FeasibleLimit`` this
    means a limit fired before any feasible point was found.
    """

    status: Status
    x: np.ndarray = None
    objective: float = None
    bound: float = -math.inf
    nodes: int = 0
    elapsed: float = 0.0
    bound_trace: list = field(default_factory=list, repr=False)
    message: str = ""

    @property
    def has_incumbent(self):
        return self.x is not None


@dataclass(order=True)
class _Node:
    bound: float
    seq: int
    changes: dict = field(compare=False)
    snap: tuple = field(compare=False)
    depth: int = field(compare=False, default=0)


def _trivial_bound(model):
    c = model.c
    lo = np.where(c >= 0, model.lb, model.ub)
    with np.errstate(invalid="ignore"):
        terms = np.where(c == 0, 0.0, c * lo)
    total = float(np.sum(terms))
    return total + model.offset if np.isfinite(total) else -math.inf


def _gap_closed(inc, bound, tol):
    return inc - bound <= tol * (1.0 + abs(inc))


def solve(model, time_limit=None, node_limit=None, int_tol=INT_TOL, feas_tol=FEAS_TOL,
          gap_tol=GAP_TOL, heuristic=True):
    """Minimize a :class:`~udgp.milp.model.MilpModel` by branch-and-bound.

    Parameters
    ----------
    model : MilpModel
    time_limit : float, optional
        Wall-clock seconds; checked between nodes (and inside long LPs).
    node_limit : int, optional
        Maximum number of LP relaxations solved. With only a node limit the
        run is deterministic.
    heuristic : bool
        Try :func:`~udgp.milp.heuristics.shift_repair` for a first incumbent.

    Returns
    -------
    MilpSolution
    """
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    sol = MilpSolution(Status.FEASIBLE_LIMIT)
    gap_abs = lambda v: gap_tol * (1.0 + abs(v))  # noqa: E731

    def finish(status, bound, message=""):
        sol.status = status
        sol.bound = bound
        sol.elapsed = time.perf_counter() - t0
        sol.message = message
        if sol.x is not None:
            sol.bound = min(sol.bound, sol.objective)
        log.info("milp %s: obj=%s bound=%.6g nodes=%d time=%.2fs %s", status.value,
                 sol.objective, sol.bound, sol.nodes, sol.elapsed, message)
        return sol

    def offer(x):
        if not is_feasible(model, x, feas_tol, int_tol):
            return False
        obj = model.objective(x)
        if sol.objective is None or obj < sol.objective - 1e-12 * (1 + abs(obj)):
            sol.x, sol.objective = x + 0.0, obj
            log.debug("incumbent %.9g after %d nodes", obj, sol.nodes)
            return True
        return False

    if heuristic:
        xh = shift_repair(model, feas_tol)
        if xh is not None:
            xh[model.integer] = np.round(xh[model.integer])
            offer(xh)

    free, x_fixed, row_lo, row_hi, offset = presolve_fixed(model)
    lb0, ub0 = model.lb[free].copy(), model.ub[free].copy()
    is_int = model.integer[free]
    lb0[is_int] = np.ceil(lb0[is_int] - int_tol)
    ub0[is_int] = np.floor(ub0[is_int] + int_tol)
    if np.any(lb0 > ub0):
        return finish(Status.INFEASIBLE, math.inf, "empty integer domain")
    try:
        check_dense_size(model.num_rows, free.size)
        lp = DenseSimplex(model.A[:, free].toarray(), row_lo, row_hi,
                          model.c[free], lb0, ub0)
    except LPTooLarge as e:
        status = Status.FEASIBLE_LIMIT
        return finish(status, _trivial_bound(model), f"relaxation not solved: {e}")

    int_idx = np.flatnonzero(is_int)

    def full(xs):
        x = x_fixed.copy()
        x[free] = xs
        return x

    def apply(changes):
        lp.lo[: lp.n] = lb0
        lp.hi[: lp.n] = ub0
        for j, (lo, hi) in changes.items():
            lp.lo[j], lp.hi[j] = lo, hi

    def polish(xs, changes):
        """Fix integers at their rounded values and re-solve for the rest."""
        xr = xs.copy()
        xr[int_idx] = np.round(xr[int_idx])
        snap = lp.snapshot()
        for j in int_idx:
            lp.set_bounds(j, xr[j], xr[j])
        if lp.solve(deadline=deadline) == LPStatus.OPTIMAL:
            xr = lp.values
            xr[int_idx] = np.round(xr[int_idx])
        apply(changes)
        lp.restore(snap)
        return xr

    def limit_hit():
        if node_limit is not None and sol.nodes >= node_limit:
            return "node limit"
        if deadline is not None and time.perf_counter() > deadline:
            return "time limit"
        return None

    counter = itertools.count()
    heap = []
    root_bound = -math.inf
    current = _Node(root_bound, next(counter), {}, None, 0)
    reason = limit_hit()

    while reason is None:
        if current is None:
            while heap and sol.objective is not None and \
                    heap[0].bound >= sol.objective - gap_abs(sol.objective):
                heapq.heappop(heap)
            if not heap:
                break
            current = heapq.heappop(heap)
            apply(current.changes)
            lp.restore(current.snap)

        open_min = min([current.bound] + ([heap[0].bound] if heap else []))
        sol.bound_trace.append(open_min)
        if sol.objective is not None and _gap_closed(sol.objective, open_min, gap_tol):
            heap.clear()
            current = None
            break

        st = lp.solve(deadline=deadline)
        sol.nodes += 1
        if st == LPStatus.TIME_LIMIT:
            heapq.heappush(heap, current)
            reason = "time limit"
            break
        if st == LPStatus.UNBOUNDED:
            if sol.nodes == 1:
                return finish(Status.UNBOUNDED, -math.inf, "LP relaxation unbounded")
            current = None
            reason = limit_hit()
            continue
        if st != LPStatus.OPTIMAL:
            current = None
            reason = limit_hit()
            continue

        obj = max(lp.objective + offset, current.bound)
        if sol.objective is not None and obj >= sol.objective - gap_abs(sol.objective):
            current = None
            reason = limit_hit()
            continue

        xs = lp.values
        frac = np.abs(xs[int_idx] - np.round(xs[int_idx]))
        if frac.size == 0 or frac.max() <= int_tol:
            if not offer(full(polish(xs, current.changes))):
                offer(full(np.where(is_int, np.round(xs), xs)))
            current = None
            reason = limit_hit()
            continue

        # most fractional, lowest index on ties
        dist = np.abs(xs[int_idx] - np.floor(xs[int_idx]) - 0.5)
        k = int(np.argmin(dist))
        j = int(int_idx[k])
        v = xs[j]
        lo_j, hi_j = lp.lo[j], lp.hi[j]
        down = dict(current.changes)
        down[j] = (lo_j, float(math.floor(v)))
        up = dict(current.changes)
        up[j] = (float(math.ceil(v)), hi_j)
        first, second = (up, down) if v - math.floor(v) >= 0.5 else (down, up)
        snap = lp.snapshot()
        heapq.heappush(heap, _Node(obj, next(counter), second, snap, current.depth + 1))
        lo_new, hi_new = first[j]
        lp.set_bounds(j, lo_new, hi_new)
        current = _Node(obj, next(counter), first, None, current.depth + 1)
        reason = limit_hit()

    if reason is None:
        if sol.objective is None:
            return finish(Status.INFEASIBLE, math.inf, "search tree exhausted")
        bound = heap[0].bound if heap else sol.objective
        return finish(Status.OPTIMAL, min(bound, sol.objective))

    bounds = [nd.bound for nd in heap]
    if current is not None:
        bounds.append(current.bound)
    bound = min(bounds) if bounds else (sol.objective if sol.objective is not None else -math.inf)
    return finish(Status.FEASIBLE_LIMIT, bound, reason)
