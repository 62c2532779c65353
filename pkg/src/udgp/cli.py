"""Command line: ``udgp gen|thin|solve-udgp|solve-dgp|eval|sweep``.

Exit codes: 0 success, 2 usage error, 3 malformed input file, 4 no
assignment found within the MILP limits, 5 I/O failure, 1 anything else.
Set ``UDGP_LOG`` to ``quiet``, ``info`` or ``debug`` for diagnostics on stderr.
"""

import argparse
import dataclasses
import logging
import os
import sys
import time

import numpy as np

from . import fileio
from .dgp import MultistartConfig, multistart, quartic_objective
from .instance import build_c60, complete_graph, random_instance, thin, true_assignment
from .metrics import EvaluationReport, adjacency_mean_error, mde, procrustes_align
from .pipeline import NoAssignmentFound, SolveConfig, solve_udgp

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_PARSE, EXIT_NO_INCUMBENT, EXIT_IO = 0, 1, 2, 3, 4, 5

log = logging.getLogger("udgp")

_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging():
    level = os.environ.get("UDGP_LOG", "quiet").lower()
    logging.basicConfig(level=_LEVELS.get(level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _limit(text):
    if text.lower() in ("none", "inf", "0"):
        return None
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("limits must be nonnegative")
    return v


def _density(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"density {text} outside (0, 1]")
    return v


def _solver_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("solver")
    g.add_argument("--k", type=int, help="embedding dimension (overrides the input file)")
    g.add_argument("--time-limit", type=_limit, default=360.0,
                   help="MILP wall-clock limit in seconds, 'none' for no limit (default 360)")
    g.add_argument("--node-limit", type=lambda s: None if s == "none" else int(s), default=None,
                   help="MILP node limit; with --time-limit none runs are reproducible")
    g.add_argument("--multistart", type=int, default=10, help="DGP starts (default 10)")
    g.add_argument("--big-m", choices=("prop22", "experimental"), default="experimental")
    g.add_argument("--extract", choices=("pca", "barvinok"),
                   help="also write the realization read off the MILP as a diagnostic")
    g.add_argument("--sym-break", action="store_true",
                   help="order pairs of equal consecutive values")
    g.add_argument("--group-multiplicities", action="store_true",
                   help="fold equal values into one index with a count")
    return p


def build_parser():
    ap = argparse.ArgumentParser(prog="udgp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    solver = _solver_flags()

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("kind", choices=("c60", "random"))
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=float, default=1.0)
    p.add_argument("--edge-length", type=float, default=1.0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("thin", help="random removal of list values")
    p.add_argument("input")
    p.add_argument("--density", type=_density, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve-udgp", parents=[solver], help="assignment and realization")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("solve-dgp", help="realize a weighted graph")
    p.add_argument("graph")
    p.add_argument("--k", type=int)
    p.add_argument("--multistart", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("eval", help="score a realization")
    p.add_argument("xyz")
    p.add_argument("graph")
    p.add_argument("--ref-graph", help="reference graph for the adjacency error")
    p.add_argument("--ref-xyz", help="reference realization for the RMSD")
    p.add_argument("--dump-xyz", help="write the realization aligned onto --ref-xyz")
    p.add_argument("--out", help="report file (default: stdout only)")

    p = sub.add_parser("sweep", parents=[solver], help="thin, solve and score over a grid")
    p.add_argument("input")
    p.add_argument("--density", type=_density, nargs="+", required=True)
    p.add_argument("--seed", type=int, nargs="+", default=[0])
    p.add_argument("--ref-xyz", help="generating realization, for adjacency error and RMSD")
    p.add_argument("--out", required=True, help="output directory")
    return ap


def _config(args):
    return SolveConfig(time_limit=args.time_limit, node_limit=args.node_limit,
                       multistart=args.multistart, seed=args.seed if isinstance(args.seed, int)
                       else 0, big_m=args.big_m, extract=args.extract,
                       sym_break=args.sym_break, group_multiplicities=args.group_multiplicities)


def _with_k(delta, k):
    if k is None or k == delta.K:
        return delta
    return type(delta)(delta.n, k, delta.values)


def _report_text(report, extra=()):
    lines = report.to_text()
    return lines + "".join(f"{k}={v}\n" for k, v in extra)


def cmd_gen(args):
    os.makedirs(args.out, exist_ok=True)
    if args.kind == "c60":
        x = build_c60(args.edge_length)
    else:
        x, _ = random_instance(args.n, args.k, args.seed, args.box)
    delta, alpha = true_assignment(x)
    fileio.write_distances(os.path.join(args.out, "instance.udgp"), delta)
    fileio.write_xyz(os.path.join(args.out, "truth.xyz"), x)
    fileio.write_graph(os.path.join(args.out, "truth.dgp"), complete_graph(x))
    fileio.write_assignment(os.path.join(args.out, "truth.assign"), alpha)
    print(f"n={delta.n} m={delta.m} N={delta.N} K={delta.K}")
    return EXIT_OK


def cmd_thin(args):
    delta = fileio.read_distances(args.input)
    out = thin(delta, args.density, args.seed)
    fileio.write_distances(args.out, out)
    print(f"m={out.m} N={out.N} density={out.m / out.N:.6f}")
    return EXIT_OK


def _write_udgp_result(res, out, extra=()):
    os.makedirs(out, exist_ok=True)
    fileio.write_assignment(os.path.join(out, "assignment.assign"), res.assignment)
    fileio.write_graph(os.path.join(out, "graph.dgp"), res.graph)
    fileio.write_xyz(os.path.join(out, "solution.xyz"), res.x)
    if res.diagnostic_x is not None:
        os.makedirs(os.path.join(out, "diagnostics"), exist_ok=True)
        fileio.write_xyz(os.path.join(out, "diagnostics", "extracted.xyz"), res.diagnostic_x,
                         "diagnostic only")
    milp = res.milp
    info = [("milp_status", milp.status.value), ("milp_objective", milp.objective),
            ("milp_bound", milp.bound), ("milp_nodes", milp.nodes), *extra]
    text = _report_text(res.report, info)
    fileio.atomic_write(os.path.join(out, "report.txt"), text)
    return text


def cmd_solve_udgp(args):
    delta = _with_k(fileio.read_distances(args.input), args.k)
    res = solve_udgp(delta, _config(args))
    sys.stdout.write(_write_udgp_result(res, args.out))
    return EXIT_OK


def cmd_solve_dgp(args):
    G = fileio.read_graph(args.graph)
    K = args.k if args.k is not None else G.K
    t0 = time.perf_counter()
    res = multistart(G, MultistartConfig(iterations=args.multistart, seed=args.seed, K=K))
    t = time.perf_counter() - t0
    report = EvaluationReport(mde=mde(res.x, G), quartic=quartic_objective(res.x, G),
                              density=G.num_edges / (G.n * (G.n - 1) / 2), time_dgp=t,
                              time_total=t)
    os.makedirs(args.out, exist_ok=True)
    fileio.write_xyz(os.path.join(args.out, "solution.xyz"), res.x)
    text = report.to_text()
    fileio.atomic_write(os.path.join(args.out, "report.txt"), text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_eval(args):
    x = fileio.read_xyz(args.xyz)
    G = fileio.read_graph(args.graph)
    x = x[:, : G.K] if x.shape[1] > G.K else x
    report = EvaluationReport(mde=mde(x, G), quartic=quartic_objective(x, G),
                              density=G.num_edges / (G.n * (G.n - 1) / 2))
    if args.ref_graph:
        report.adjacency_mean_error = adjacency_mean_error(G, fileio.read_graph(args.ref_graph))
    if args.ref_xyz:
        ref = fileio.read_xyz(args.ref_xyz)
        k = max(x.shape[1], ref.shape[1])
        pad = lambda a: np.hstack([a, np.zeros((a.shape[0], k - a.shape[1]))])  # noqa: E731
        al = procrustes_align(pad(x), pad(ref))
        report.rmsd = al.rmsd
        if args.dump_xyz:
            fileio.write_xyz(args.dump_xyz, al.x, "aligned")
    elif args.dump_xyz:
        fileio.write_xyz(args.dump_xyz, x)
    text = report.to_text()
    if args.out:
        fileio.atomic_write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


SWEEP_COLUMNS = ("density", "seed", "m", "realized_density", "status", "milp_status", "mde",
                 "adjacency_error", "rmsd", "quartic", "time_milp", "time_dgp", "time_total",
                 "message")


def _cell(v):
    if v is None:
        return "nan"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v).replace("\t", " ").replace("\n", " ")


def cmd_sweep(args):
    delta = _with_k(fileio.read_distances(args.input), args.k)
    ref = fileio.read_xyz(args.ref_xyz) if args.ref_xyz else None
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for density in sorted(set(args.density)):
        for seed in sorted(set(args.seed)):
            row = dict.fromkeys(SWEEP_COLUMNS)
            row.update(density=density, seed=seed)
            tag = os.path.join(args.out, f"d{density:.6f}_s{seed}")
            try:
                sub = thin(delta, density, seed)
                row.update(m=sub.m, realized_density=sub.m / sub.N)
                cfg = dataclasses.replace(_config(args), seed=seed)
                res = solve_udgp(sub, cfg)
                rep = res.report
                if ref is not None:
                    rep.adjacency_mean_error = adjacency_mean_error(complete_graph(res.x),
                                                                    complete_graph(ref))
                    rep.rmsd = procrustes_align(res.x, ref).rmsd
                _write_udgp_result(res, tag)
                row.update(status="ok", milp_status=res.milp.status.value, mde=rep.mde,
                           adjacency_error=rep.adjacency_mean_error, rmsd=rep.rmsd,
                           quartic=rep.quartic, time_milp=rep.time_milp,
                           time_dgp=rep.time_dgp, time_total=rep.time_total,
                           message=res.milp.message)
            except NoAssignmentFound as e:
                row.update(status="no_assignment", message=str(e))
            except Exception as e:  # a failed cell must not stop the sweep
                log.exception("sweep cell density=%s seed=%s failed", density, seed)
                row.update(status="error", message=f"{type(e).__name__}: {e}")
            rows.append(row)
            log.info("sweep density=%s seed=%s status=%s mde=%s", density, seed,
                     row["status"], row["mde"])
    text = "\t".join(SWEEP_COLUMNS) + "\n"
    text += "".join("\t".join(_cell(r[c]) for c in SWEEP_COLUMNS) + "\n" for r in rows)
    fileio.atomic_write(os.path.join(args.out, "sweep.tsv"), text)
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "thin": cmd_thin, "solve-udgp": cmd_solve_udgp,
            "solve-dgp": cmd_solve_dgp, "eval": cmd_eval, "sweep": cmd_sweep}


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except fileio.ParseError as e:
        print(f"udgp: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except NoAssignmentFound as e:
        print(f"udgp: {e}", file=sys.stderr)
        return EXIT_NO_INCUMBENT
    except OSError as e:
        print(f"udgp: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"udgp: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
