"""Unassigned distance geometry by a mixed-integer diagonally dominant matheuristic."""

from .dgp import LocalSettings, MultistartConfig, local_solve, multistart, quartic_gradient, quartic_objective
from .instance import (Assignment, DistanceList, WeightedGraph, build_c60, complete_graph,
                       distances_from_realization, random_instance, thin, true_assignment)
from .linalg import (barvinok_realization, gershgorin_intervals, gram_from_realization, is_dd,
                     is_psd, pca_realization, spectral_decompose)
from .metrics import EvaluationReport, adjacency_mean_error, mde, procrustes_align
from .middp import (assignment_to_graph, big_m, brute_force_udgp, build_middp,
                    evaluate_minlp_objective, evaluate_sandwich_residuals, extract_assignment,
                    middp_size)
from .pipeline import NoAssignmentFound, SolveConfig, solve_udgp

__version__ = "0.1.0"
