"""Bounded-variable primal simplex on a dense tableau.

Rows are written as ``lo_r <= a_r.x <= hi_r`` and turned into equalities
``A x - s = 0`` with one bounded logical variable ``s_r`` per row, so every
variable (structural or logical) simply lives in ``[lo, hi]``. The initial
basis is the logical one. Phase 1 minimizes the sum of bound violations of
the basic variables, which works from any basis; this lets branch-and-bound
change a bound and re-solve from the parent's basis.

Pricing is Dantzig's largest reduced cost. After ``DEGENERATE_LIMIT``
consecutive degenerate pivots the method switches to Bland's smallest-index
rule until a step makes progress.
"""

import time
from enum import Enum

import numpy as np

from .model import MilpModel

FEAS_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-9
DEGENERATE_LIMIT = 50
REFACTOR_EVERY = 100

#: Largest tableau (rows x columns) the dense engine will allocate.
MAX_DENSE_ENTRIES = 15_000_000


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    TIME_LIMIT = "time_limit"


class LPTooLarge(MemoryError):
    """The dense tableau would exceed ``MAX_DENSE_ENTRIES``."""


def check_dense_size(m, n):
    """Raise :class:`LPTooLarge` if an ``m x n`` LP would not fit the dense engine."""
    if m * (n + m) > MAX_DENSE_ENTRIES:
        raise LPTooLarge(f"dense tableau {m} x {n + m} exceeds the engine limit")


class DenseSimplex:
    """Warm-startable LP ``min c.x`` over ``row_lo <= A x <= row_hi``, ``lb <= x <= ub``."""

    def __init__(self, A, row_lo, row_hi, c, lb, ub):
        A = np.asarray(A, dtype=float)
        m, n = A.shape
        check_dense_size(m, n)
        self.m, self.n = m, n
        self.M = np.hstack([A, -np.eye(m)])
        self.lo = np.concatenate([np.asarray(lb, float), np.asarray(row_lo, float)])
        self.hi = np.concatenate([np.asarray(ub, float), np.asarray(row_hi, float)])
        self.cost = np.concatenate([np.asarray(c, float), np.zeros(m)])
        self.pivots = 0
        self._slack_basis()

    # basis bookkeeping

    def _slack_basis(self):
        self.basis = np.arange(self.n, self.n + self.m)
        self.is_basic = np.zeros(self.n + self.m, bool)
        self.is_basic[self.basis] = True
        self.at_upper = np.zeros(self.n + self.m, bool)
        self.x = np.zeros(self.n + self.m)
        self._refactor()

    def _nonbasic_values(self):
        nb = ~self.is_basic
        lo, hi = self.lo, self.hi
        val = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        up = self.at_upper & np.isfinite(hi)
        val = np.where(up, hi, val)
        self.at_upper = np.where(nb, up | (~np.isfinite(lo) & np.isfinite(hi)), False)
        self.x[nb] = val[nb]

    def _refactor(self):
        B = self.M[:, self.basis]
        try:
            self.T = np.linalg.solve(B, self.M)
        except np.linalg.LinAlgError:
            self.basis = np.arange(self.n, self.n + self.m)
            self.is_basic[:] = False
            self.is_basic[self.basis] = True
            self.T = np.linalg.solve(self.M[:, self.basis], self.M)
        self.T[:, self.basis] = np.eye(self.m)
        self._nonbasic_values()
        xn = np.where(self.is_basic, 0.0, self.x)
        self.x[self.basis] = -(self.T @ xn)
        self._since_refactor = 0

    def snapshot(self):
        return self.basis.copy(), self.at_upper.copy()

    def restore(self, snap):
        basis, at_upper = snap
        self.basis = basis.copy()
        self.is_basic[:] = False
        self.is_basic[self.basis] = True
        self.at_upper = at_upper.copy()
        self._refactor()

    def set_bounds(self, j, lo, hi):
        """Change the bounds of structural variable ``j`` keeping the basis."""
        self.lo[j], self.hi[j] = lo, hi
        if self.is_basic[j]:
            return
        old = self.x[j]
        if self.at_upper[j] and np.isfinite(hi):
            new = hi
        elif np.isfinite(lo):
            new, self.at_upper[j] = lo, False
        elif np.isfinite(hi):
            new, self.at_upper[j] = hi, True
        else:
            new = 0.0
        if new != old:
            self.x[j] = new
            self.x[self.basis] -= self.T[:, j] * (new - old)

    @property
    def values(self):
        return self.x[: self.n].copy()

    @property
    def objective(self):
        return float(self.cost[: self.n] @ self.x[: self.n])

    # iterations

    def _pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.is_basic[self.basis[r]] = False
        self.is_basic[j] = True
        self.basis[r] = j
        self.pivots += 1
        self._since_refactor += 1

    def solve(self, max_iter=None, deadline=None):
        """Run phase 1 / phase 2 from the current basis; return an :class:`LPStatus`."""
        m, ncols = self.m, self.n + self.m
        if max_iter is None:
            max_iter = 50 * (ncols + 10)
        degenerate = 0
        bland = False
        stuck = 0
        for it in range(max_iter):
            if deadline is not None and it % 32 == 0 and time.perf_counter() > deadline:
                return LPStatus.TIME_LIMIT
            if self._since_refactor >= REFACTOR_EVERY:
                self._refactor()
            x, lo, hi = self.x, self.lo, self.hi
            bas = self.basis
            xB, loB, hiB = x[bas], lo[bas], hi[bas]
            tolB = FEAS_TOL * np.maximum(1.0, np.abs(xB))
            below = xB < loB - tolB
            above = xB > hiB + tolB
            phase1 = bool(below.any() or above.any())
            if phase1:
                cB = above.astype(float) - below.astype(float)
                d = -(cB @ self.T)
            else:
                d = self.cost - self.cost[bas] @ self.T
            d[bas] = 0.0
            nb = ~self.is_basic
            inc = nb & (x < hi) & (d < -DUAL_TOL)
            dec = nb & (x > lo) & (d > DUAL_TOL)
            cand = inc | dec
            if not cand.any():
                if self._since_refactor:
                    self._refactor()
                    continue
                return LPStatus.INFEASIBLE if phase1 else LPStatus.OPTIMAL
            if bland:
                j = int(np.flatnonzero(cand)[0])
            else:
                j = int(np.argmax(np.where(cand, np.abs(d), -1.0)))
            dirn = 1.0 if d[j] < 0 else -1.0
            delta = -dirn * self.T[:, j]

            # ratio test: first breakpoint along the ray
            target = np.full(m, np.nan)
            dn = delta < -PIVOT_TOL
            up = delta > PIVOT_TOL
            target = np.where(dn & above, hiB, target)
            target = np.where(dn & ~above & ~below, loB, target)
            target = np.where(up & below, loB, target)
            target = np.where(up & ~above & ~below, hiB, target)
            with np.errstate(invalid="ignore", divide="ignore"):
                ratio = (target - xB) / delta
            ratio = np.where(np.isfinite(ratio), np.maximum(ratio, 0.0), np.inf)

            flip = hi[j] - lo[j]
            t = float(ratio.min()) if m else np.inf
            if t < flip:
                ties = np.flatnonzero(ratio <= t + 1e-12 * (1.0 + t))
                if bland:
                    r = int(ties[np.argmin(bas[ties])])
                else:
                    r = int(ties[np.argmax(np.abs(delta[ties]))])
            else:
                t, r = flip, -1
            if not np.isfinite(t):
                if phase1:
                    stuck += 1
                    if stuck > 3:
                        return LPStatus.INFEASIBLE
                    self._refactor()
                    continue
                return LPStatus.UNBOUNDED

            x[j] += dirn * t
            x[bas] += delta * t
            if r < 0:
                self.at_upper[j] = dirn > 0
            else:
                leaving = bas[r]
                x[leaving] = target[r]
                self.at_upper[leaving] = target[r] == hi[leaving] and target[r] != lo[leaving]
                self.at_upper[j] = False
                self._pivot(r, j)

            if t <= 1e-12:
                degenerate += 1
                if degenerate > DEGENERATE_LIMIT:
                    bland = True
            else:
                degenerate = 0
                bland = False
        return LPStatus.ITERATION_LIMIT


class LPResult:
    def __init__(self, status, x=None, objective=None):
        self.status = status
        self.x = x
        self.objective = objective

    def __repr__(self):
        return f"LPResult(status={self.status.value}, objective={self.objective})"


def presolve_fixed(model):
    """Drop variables with ``lb == ub``.

    Returns ``(free, x_fixed, row_lo, row_hi, offset)`` where ``free`` indexes
    the kept columns and the row bounds already account for fixed values.
    """
    fixed = model.lb == model.ub
    free = np.flatnonzero(~fixed)
    x_fixed = np.where(fixed, model.lb, 0.0)
    shift = model.A @ x_fixed
    lo, hi = model.row_bounds()
    return free, x_fixed, lo - shift, hi - shift, float(model.c @ x_fixed) + model.offset


def solve_lp(model, deadline=None):
    """Solve the continuous relaxation of ``model``.

    Returns an :class:`LPResult` whose ``x`` covers every variable of the model.
    """
    if not isinstance(model, MilpModel):
        raise TypeError("solve_lp expects a MilpModel")
    free, x_fixed, lo, hi, offset = presolve_fixed(model)
    check_dense_size(model.num_rows, free.size)
    A = model.A[:, free].toarray()
    lp = DenseSimplex(A, lo, hi, model.c[free], model.lb[free], model.ub[free])
    status = lp.solve(deadline=deadline)
    if status != LPStatus.OPTIMAL:
        return LPResult(status)
    x = x_fixed.copy()
    x[free] = lp.values
    return LPResult(status, x, lp.objective + offset)
