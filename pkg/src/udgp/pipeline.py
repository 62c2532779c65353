"""The five-step matheuristic: MIDDP assignment, graph, DGP multistart."""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .dgp import LocalSettings, MultistartConfig, multistart, quartic_objective
from .linalg import barvinok_realization, pca_realization
from .metrics import EvaluationReport, mde
from .middp import assignment_to_graph, big_m, build_middp, extract_assignment
from .milp import solve

log = logging.getLogger(__name__)


class NoAssignmentFound(RuntimeError):
    """The MILP stopped at a limit without an incumbent."""


@dataclass(frozen=True)
class SolveConfig:
    """Knobs of :func:`solve_udgp`; ``time_limit``/``node_limit`` of ``None`` mean no limit."""

    time_limit: float = 360.0
    node_limit: int = None
    multistart: int = 10
    seed: int = 0
    big_m: str = "experimental"
    extract: str = None
    sym_break: bool = False
    group_multiplicities: bool = False
    local: LocalSettings = field(default_factory=LocalSettings)


@dataclass
class UdgpResult:
    assignment: object
    graph: object
    x: np.ndarray
    f: float
    milp: object
    report: EvaluationReport
    diagnostic_x: np.ndarray = None


def solve_udgp(delta, cfg=SolveConfig()):
    """Assignment by MIDDP, then coordinates by multistart on the assigned graph.

    The realization that can be read off the MILP's ``X`` (``cfg.extract`` of
    ``"pca"`` or ``"barvinok"``) is returned as ``diagnostic_x`` only; the
    coordinates come from the DGP step alone.
    """
    t0 = time.perf_counter()
    enc = build_middp(delta, big_m(delta, cfg.big_m), cfg.sym_break, cfg.group_multiplicities,
                      names=False)
    sol = solve(enc.model, time_limit=cfg.time_limit, node_limit=cfg.node_limit)
    t_milp = time.perf_counter() - t0
    if not sol.has_incumbent:
        raise NoAssignmentFound(f"no assignment found ({sol.message}); raise the limits")
    alpha = extract_assignment(enc, sol)

    diag = None
    if cfg.extract:
        X = enc.split(sol.x)["X"]
        try:
            if cfg.extract == "pca":
                diag = pca_realization(X, delta.K)
            elif cfg.extract == "barvinok":
                diag = barvinok_realization(X, delta.K, cfg.seed)
            else:
                raise ValueError(f"unknown extraction {cfg.extract!r}")
        except ValueError as e:
            if "unknown" in str(e):
                raise
            log.warning("diagnostic extraction failed: %s", e)

    G = assignment_to_graph(alpha, delta)
    t1 = time.perf_counter()
    ms = multistart(G, MultistartConfig(iterations=cfg.multistart, seed=cfg.seed, K=delta.K,
                                        local=cfg.local))
    t_dgp = time.perf_counter() - t1
    report = EvaluationReport(
        mde=mde(ms.x, G), quartic=quartic_objective(ms.x, G), density=delta.m / delta.N,
        time_milp=t_milp, time_dgp=t_dgp, time_total=time.perf_counter() - t0,
    )
    log.info("udgp: milp=%s obj=%.6g mde=%.3e", sol.status.value, sol.objective, report.mde)
    return UdgpResult(alpha, G, ms.x, ms.f, sol, report, diag)
