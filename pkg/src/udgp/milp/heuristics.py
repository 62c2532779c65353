"""LP-free primal heuristic: greedy shifting of integers, then slack repair.

Starting from the point closest to zero within the bounds, rows made only of
integer variables are repaired one at a time by moving single variables in
index order, never breaking another integer-only row. Remaining violated rows
are then fixed by moving continuous column singletons (variables that appear
in that row only), which is how slack-style variables absorb errors.
Returns ``None`` when some row cannot be repaired this way.
"""

import numpy as np

from .model import is_feasible

_TOL = 1e-9


def shift_repair(model, feas_tol=1e-7):
    A = model.A.tocsr()
    At = A.tocsc()
    lb, ub, integer = model.lb, model.ub, model.integer
    x = np.clip(0.0, lb, ub)
    x[integer] = np.clip(np.round(x[integer]), np.ceil(lb[integer]), np.floor(ub[integer]))
    lo, hi = model.row_bounds()
    act = A @ x

    def row_ok(r, a):
        return lo[r] - _TOL <= a <= hi[r] + _TOL

    pattern = A.copy()
    pattern.data = np.ones_like(pattern.data)
    int_rows = np.flatnonzero(pattern @ (~integer).astype(float) == 0)
    is_int_row = np.zeros(A.shape[0], bool)
    is_int_row[int_rows] = True

    for r in int_rows:
        for _ in range(A.indptr[r + 1] - A.indptr[r] + 1):
            if row_ok(r, act[r]):
                break
            need_up = act[r] < lo[r]
            moved = False
            for k in range(A.indptr[r], A.indptr[r + 1]):
                j, a = A.indices[k], A.data[k]
                step = 1.0 if (a > 0) == need_up else -1.0
                if not lb[j] <= x[j] + step <= ub[j]:
                    continue
                col = slice(At.indptr[j], At.indptr[j + 1])
                rows, vals = At.indices[col], At.data[col]
                new = act[rows] + step * vals
                ok = True
                for rr, aa_old, aa in zip(rows, act[rows], new):
                    if rr == r or not is_int_row[rr]:
                        continue
                    if not row_ok(rr, aa) and row_ok(rr, aa_old):
                        ok = False
                        break
                if ok:
                    x[j] += step
                    act[rows] = new
                    moved = True
                    break
            if not moved:
                return None

    singleton = np.diff(At.indptr) == 1
    for r in np.flatnonzero((act < lo - _TOL) | (act > hi + _TOL)):
        gap = lo[r] - act[r] if act[r] < lo[r] else hi[r] - act[r]
        fixed = False
        for k in range(A.indptr[r], A.indptr[r + 1]):
            j, a = A.indices[k], A.data[k]
            if integer[j] or not singleton[j]:
                continue
            v = x[j] + gap / a
            if lb[j] <= v <= ub[j]:
                x[j] = v
                act[r] += gap
                fixed = True
                break
        if not fixed:
            return None
    return x if is_feasible(model, x, feas_tol) else None
