"""Mixed-integer linear programming: models, a simplex LP engine and branch-and-bound."""

from .bnb import FEAS_TOL, GAP_TOL, INT_TOL, MilpSolution, Status, solve
from .heuristics import shift_repair
from .lpformat import format_lp, write_lp
from .model import EQ, GE, LE, MilpModel, ModelBuilder, integrality_violation, is_feasible, violations
from .simplex import DenseSimplex, LPResult, LPStatus, LPTooLarge, solve_lp

__all__ = [
    "DenseSimplex", "EQ", "FEAS_TOL", "GAP_TOL", "GE", "INT_TOL", "LE", "LPResult", "LPStatus",
    "LPTooLarge", "MilpModel", "MilpSolution", "ModelBuilder", "Status", "format_lp",
    "integrality_violation", "is_feasible", "shift_repair", "solve", "solve_lp", "violations",
    "write_lp",
]
