"""Linear models with integer variables, in sparse row form."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

LE, EQ, GE = "<=", "==", ">="
_SENSES = {"<": LE, "<=": LE, "=": EQ, "==": EQ, ">": GE, ">=": GE}


def _ro(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MilpModel:
    """``min c.x + offset`` s.t. ``A x (sense) rhs``, ``lb <= x <= ub``, some ``x`` integer.

    Arrays are read-only after construction. Integer variables must have
    finite bounds.
    """

    c: np.ndarray
    A: sp.csr_matrix
    sense: np.ndarray
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integer: np.ndarray
    names: tuple = None
    offset: float = 0.0

    def __post_init__(self):
        n = len(self.c)
        A = sp.csr_matrix(self.A, dtype=float)
        A.sum_duplicates()
        m = A.shape[0]
        if A.shape[1] != n:
            raise ValueError(f"A has {A.shape[1]} columns for {n} variables")
        sense = np.array([_SENSES[s] for s in np.asarray(self.sense).tolist()], dtype=object)
        if sense.size != m or len(self.rhs) != m:
            raise ValueError("sense/rhs length must match the number of rows")
        for name in ("lb", "ub", "integer"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} must have one entry per variable")
        lb = np.asarray(self.lb, dtype=float)
        ub = np.asarray(self.ub, dtype=float)
        integer = np.asarray(self.integer, dtype=bool)
        if not np.all(np.isfinite(A.data)) or not np.all(np.isfinite(self.c)):
            raise ValueError("coefficients must be finite")
        if not np.all(np.isfinite(self.rhs)):
            raise ValueError("right-hand sides must be finite")
        if np.any(lb > ub) or np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise ValueError("empty variable domain")
        if np.any(~np.isfinite(lb[integer])) or np.any(~np.isfinite(ub[integer])):
            raise ValueError("integer variables need finite bounds")
        if self.names is not None and len(self.names) != n:
            raise ValueError("one name per variable")
        A.data.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", _ro(self.c, float))
        object.__setattr__(self, "sense", _ro(sense, object))
        object.__setattr__(self, "rhs", _ro(self.rhs, float))
        object.__setattr__(self, "lb", _ro(lb, float))
        object.__setattr__(self, "ub", _ro(ub, float))
        object.__setattr__(self, "integer", _ro(integer, bool))

    @property
    def num_vars(self):
        return len(self.c)

    @property
    def num_rows(self):
        return self.A.shape[0]

    @property
    def num_integer(self):
        return int(self.integer.sum())

    def name(self, j):
        return self.names[j] if self.names is not None else f"x{j}"

    def row_bounds(self):
        """Each row as ``lo <= a.x <= hi`` (infinite where one-sided)."""
        lo = np.where(self.sense == LE, -np.inf, self.rhs).astype(float)
        hi = np.where(self.sense == GE, np.inf, self.rhs).astype(float)
        return lo, hi

    def relaxed(self):
        """Same model with integrality dropped."""
        return MilpModel(self.c, self.A, self.sense, self.rhs, self.lb, self.ub,
                         np.zeros(self.num_vars, bool), self.names, self.offset)

    def objective(self, x):
        return float(self.c @ np.asarray(x, dtype=float) + self.offset)


class ModelBuilder:
    """Incremental construction of a :class:`MilpModel` (minimization)."""

    def __init__(self):
        self._lb, self._ub, self._int, self._names, self._c = [], [], [], [], []
        self._rows, self._cols, self._vals = [], [], []
        self._sense, self._rhs = [], []
        self.offset = 0.0

    @property
    def num_vars(self):
        return len(self._lb)

    def add_var(self, name=None, lb=0.0, ub=np.inf, integer=False, obj=0.0):
        j = len(self._lb)
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        self._int.append(bool(integer))
        self._names.append(name if name is not None else f"x{j}")
        self._c.append(float(obj))
        return j

    def add_binary(self, name=None, obj=0.0):
        return self.add_var(name, 0.0, 1.0, True, obj)

    def add_constraint(self, coeffs, sense, rhs):
        """Add ``sum coeffs[j] x_j (sense) rhs``; ``coeffs`` maps index to value."""
        r = len(self._rhs)
        for j, v in dict(coeffs).items():
            if v != 0:
                self._rows.append(r)
                self._cols.append(int(j))
                self._vals.append(float(v))
        self._sense.append(_SENSES[sense])
        self._rhs.append(float(rhs))
        return r

    def set_objective(self, coeffs, offset=0.0):
        self._c = [0.0] * len(self._lb)
        for j, v in dict(coeffs).items():
            self._c[j] = float(v)
        self.offset = float(offset)

    def build(self):
        n, m = len(self._lb), len(self._rhs)
        A = sp.csr_matrix((self._vals, (self._rows, self._cols)), shape=(m, n))
        return MilpModel(np.array(self._c), A, np.array(self._sense, dtype=object),
                         np.array(self._rhs), np.array(self._lb), np.array(self._ub),
                         np.array(self._int, dtype=bool), tuple(self._names), self.offset)


def violations(model, x):
    """Largest constraint violation and largest bound violation of ``x``."""
    x = np.asarray(x, dtype=float)
    act = model.A @ x
    lo, hi = model.row_bounds()
    row = np.maximum(lo - act, act - hi)
    bnd = np.maximum(model.lb - x, x - model.ub)
    return (float(row.max()) if row.size else 0.0, float(bnd.max()) if bnd.size else 0.0)


def integrality_violation(model, x):
    x = np.asarray(x, dtype=float)[model.integer]
    return float(np.max(np.abs(x - np.round(x)))) if x.size else 0.0


def is_feasible(model, x, feas_tol=1e-7, int_tol=1e-6):
    """Independent feasibility check of a full solution vector."""
    row, bnd = violations(model, x)
    return row <= feas_tol and bnd <= feas_tol and integrality_violation(model, x) <= int_tol
