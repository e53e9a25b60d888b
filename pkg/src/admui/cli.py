"""Command-line interface: ``admui {decompose,project,random,copy,gate,bench}``.

Exit codes: 0 on success, 2 when the solver stopped at its iteration cap,
1 on any error (message on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bench import COLUMNS, COPY_COLUMNS, copy_tasks, format_tsv, random_tasks, run_tasks, summary_rows
from .core import SolverConfig, SolveStatus
from .decomposition import COMPONENTS, decompose
from .errors import PIDError
from .ingest import (
    ColumnSpec,
    DatasetConfig,
    IngestReport,
    format_joint,
    load_joint,
    load_joint_from_table,
    save_joint,
)
from .iprojection import DistanceStop, ProjectionTarget, i_project
from .probkit import gen_binary_gate, gen_copy, gen_simplex_uniform

_LABELS = {
    "mi_total": "I(S;Y,Z)",
    "ui_y": "UI(S;Y\\Z)",
    "ui_z": "UI(S;Z\\Y)",
    "si": "SI(S;Y,Z)",
    "ci": "CI(S;Y,Z)",
    "mi_sy": "I(S;Y)",
    "mi_sz": "I(S;Z)",
    "coi": "CoI(S;Y;Z)",
    "union_info": "I_union(S;Y,Z)",
}


def _float_list(text):
    return [float(x) for x in text.split(",") if x]


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _sizes(text):
    return tuple(int(x) for x in text.lower().replace("x", ",").split(",") if x)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("PID_SEED", "0"))


def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--eps", type=float, default=1e-6, help="outer accuracy in nats (default 1e-6)")
    g.add_argument("--eps-inner", type=float, default=None, help="inner accuracy (default eps * 1e-2)")
    g.add_argument("--gamma", type=float, default=1.0, help="proximal GIS parameter in (0, 1]")
    g.add_argument("--stop", choices=("heuristic", "rigorous"), default="heuristic")
    g.add_argument("--check-every", type=int, default=1, help="evaluate the outer stop rule every N iterations")
    g.add_argument("--max-iter", type=int, default=100_000, help="outer iteration cap")
    g.add_argument("--max-inner-iter", type=int, default=100_000)
    g.add_argument("--parallel", action=argparse.BooleanOptionalAction, default=False,
                   help="run the per-s projections on a thread pool")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        epsilon=args.eps,
        epsilon1=args.eps_inner,
        gamma=args.gamma,
        stop_mode=args.stop,
        check_cadence=args.check_every,
        max_outer_iter=args.max_iter,
        max_inner_iter=args.max_inner_iter,
        parallel_step1=args.parallel,
    )


def _parse_bin(text):
    name, _, cuts = text.partition("=")
    if not cuts:
        raise argparse.ArgumentTypeError(f"--bin expects COLUMN=c1,c2,..., got {text!r}")
    return name, _float_list(cuts)


def _column(name, bins):
    if name in bins:
        return ColumnSpec(name, "binned", tuple(bins[name]))
    return ColumnSpec(name)


def _load_input(args):
    if args.joint:
        return load_joint(args.joint), {"joint": args.joint}
    if not (args.s and args.y and args.z):
        raise PIDError("--csv needs --s, --y and --z column names")
    bins = dict(args.bin or [])
    cfg = DatasetConfig(
        _column(args.s, bins), _column(args.y, bins), _column(args.z, bins),
        delimiter=args.delimiter, header=not args.no_header, alpha=args.alpha,
    )
    report = IngestReport()
    dist = load_joint_from_table(args.csv, cfg, report)
    return dist, {"csv": args.csv, "s": args.s, "y": args.y, "z": args.z,
                  "rows_kept": report.rows_kept, "rows_dropped": report.rows_dropped}


def build_report(result, source, config, timings, unit) -> dict:
    values = result.values(unit)
    report = {
        "command": "decompose",
        "source": source,
        "config": {
            "eps": config.epsilon,
            "eps_inner": config.epsilon1,
            "gamma": config.gamma,
            "stop": config.stop_mode.value,
            "check_every": config.check_cadence,
            "max_iter": config.max_outer_iter,
        },
        "unit": unit,
        "values": values,
        "shares": result.shares(),
        "status": result.solver.status.value,
        "outer_iterations": result.solver.outer_iterations,
        "inner_iterations": result.solver.inner_iterations_total,
        "timings_ms": timings,
    }
    return report


def _emit_decompose(report, fmt, out):
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True) + "\n")
        return
    if fmt == "tsv":
        keys = list(report["values"])
        share_keys = [f"share_{k}" for k in COMPONENTS] if report["shares"] else []
        cols = keys + share_keys + ["status", "outer_iterations", "inner_iterations"]
        vals = [repr(report["values"][k]) for k in keys]
        vals += [repr(report["shares"][k]) for k in COMPONENTS] if report["shares"] else []
        vals += [report["status"], str(report["outer_iterations"]), str(report["inner_iterations"])]
        out.write("\t".join(cols) + "\n" + "\t".join(vals) + "\n")
        return
    unit = report["unit"]
    out.write(f"partial information decomposition ({unit})\n")
    for k, v in report["source"].items():
        out.write(f"  {k:<16}{v}\n")
    shares = report["shares"] or {}
    for k in ("mi_total",) + COMPONENTS + ("mi_sy", "mi_sz", "coi"):
        share = f"   share {shares[k]:.4f}" if k in shares else ""
        out.write(f"  {_LABELS[k]:<16}{report['values'][k]:.9f}{share}\n")
    out.write(
        f"  status          {report['status']} after {report['outer_iterations']} outer / "
        f"{report['inner_iterations']} inner iterations ({report['timings_ms']['total']:.1f} ms)\n"
    )


def cmd_decompose(args) -> int:
    t0 = time.perf_counter()
    dist, source = _load_input(args)
    t1 = time.perf_counter()
    config = _solver_config(args)
    result = decompose(dist, config)
    t2 = time.perf_counter()
    timings = {"load": (t1 - t0) * 1e3, "solve": (t2 - t1) * 1e3, "total": (t2 - t0) * 1e3}
    report = build_report(result, source, config, timings, "nats" if args.nats else "bits")
    _emit_decompose(report, args.format, sys.stdout)
    return 2 if result.solver.status is SolveStatus.CAP_REACHED else 0


def _vector(text, n, name):
    v = np.array(_float_list(text))
    if v.size != n:
        raise PIDError(f"{name} needs {n} entries, got {v.size}")
    return v


def cmd_project(args) -> int:
    dist = load_joint(args.joint)
    p = dist.pmf
    s_alph = dist.alphabets[0]
    s = s_alph.index(args.s) if args.s in s_alph.labels else int(args.s)
    ps = p[s].sum()
    if ps <= 0 and not (args.target_y and args.target_z):
        raise PIDError(f"P_S({args.s}) = 0; pass --target-y and --target-z")
    ny, nz = p.shape[1:]
    ty = _vector(args.target_y, ny, "--target-y") if args.target_y else p[s].sum(axis=1) / ps
    tz = _vector(args.target_z, nz, "--target-z") if args.target_z else p[s].sum(axis=0) / ps
    r = np.full((ny, nz), 1.0 / (ny * nz)) if args.reference == "uniform" else p.sum(axis=0)
    eps1 = args.eps_inner if args.eps_inner is not None else 1e-8
    res = i_project(r, ProjectionTarget(ty, tz), args.gamma, DistanceStop(eps1), args.max_inner_iter, s)
    y_labels, z_labels = dist.alphabets[1].labels, dist.alphabets[2].labels
    out = sys.stdout
    out.write("y\\z\t" + "\t".join(z_labels) + "\n")
    for i, yl in enumerate(y_labels):
        out.write(yl + "\t" + "\t".join(f"{v:.17g}" for v in res.q.probs[i]) + "\n")
    sys.stderr.write(
        f"# {res.status.value} after {res.iterations} iterations; "
        f"last squared step {res.final_sq_step:.3g}, expectation gap {res.final_eta_gap:.3g}\n"
    )
    return 0 if res.status.value == "Converged" else 2


def _write_or_print(dist, out):
    if out:
        save_joint(dist, out)
    else:
        sys.stdout.write(format_joint(dist))


def cmd_random(args) -> int:
    sizes = _sizes(args.sizes)
    seed = _seed(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, d in enumerate(gen_simplex_uniform(sizes, seed, args.count)):
        path = outdir / f"random_{'x'.join(map(str, sizes))}_s{seed}_{i:04d}.pid"
        save_joint(d, path)
        print(path)
    return 0


def cmd_copy(args) -> int:
    _write_or_print(gen_copy(args.k), args.out)
    return 0


def cmd_gate(args) -> int:
    _write_or_print(gen_binary_gate(args.name), args.out)
    return 0


def cmd_bench(args) -> int:
    seed = _seed(args)
    if args.copy:
        tasks = copy_tasks(_int_list(args.copy), args.stop, _float_list(args.eps), _float_list(args.gammas),
                           args.check_every, args.max_iter)
        columns = COPY_COLUMNS
    else:
        sizes_list = [_sizes(s) for s in args.sizes.split(",")] if args.sizes else [(2, 2, 2)]
        tasks = random_tasks(sizes_list, args.count, seed, args.stop, _float_list(args.gammas),
                             _float_list(args.eps), args.check_every, args.max_iter)
        columns = COLUMNS
    rows = run_tasks(tasks, args.jobs)
    rows += summary_rows(rows)
    sys.stdout.write(format_tsv(rows, columns, timing=not args.no_timing))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="admui", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"admui {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose I(S;Y,Z) of a joint distribution")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--joint", help="pid-joint v1 file")
    src.add_argument("--csv", help="delimited data file")
    p.add_argument("--s", help="column holding S (name, or index with --no-header)")
    p.add_argument("--y")
    p.add_argument("--z")
    p.add_argument("--bin", action="append", type=_parse_bin, metavar="COL=c1,c2,...",
                   help="bin a numeric column at right-open cut points (repeatable)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--alpha", type=float, default=0.0, help="additive pseudocount per cell")
    units = p.add_mutually_exclusive_group()
    units.add_argument("--bits", action="store_true", default=True)
    units.add_argument("--nats", action="store_true")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--tsv", dest="format", action="store_const", const="tsv")
    fmt.add_argument("--json-lines", dest="format", action="store_const", const="json")
    p.set_defaults(format="text", func=cmd_decompose)
    _add_solver_flags(p)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("project", help="I-project a reference table onto one s-slice")
    p.add_argument("--joint", required=True)
    p.add_argument("--s", required=True, help="S label or index")
    p.add_argument("--target-y", help="comma-separated Y marginal (default P(Y|s))")
    p.add_argument("--target-z", help="comma-separated Z marginal (default P(Z|s))")
    p.add_argument("--reference", choices=("uniform", "pyz"), default="uniform")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--eps-inner", type=float, default=None)
    p.add_argument("--max-inner-iter", type=int, default=100_000)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("random", help="write joints sampled uniformly from the simplex")
    p.add_argument("--sizes", default="2,2,2")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="falls back to $PID_SEED, then 0")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("copy", help="write the COPY distribution S = (Y, Z)")
    p.add_argument("k", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_copy)

    p = sub.add_parser("gate", help="write S = gate(Y, Z) for uniform bits")
    p.add_argument("name", choices=("XOR", "AND", "xor", "and"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("bench", help="timing and iteration table over seeded instances")
    p.add_argument("--sizes", help="comma-separated list like 2x2x2,3x3x3 (default 2x2x2)")
    p.add_argument("--copy", help="comma-separated COPY parameters k, e.g. 2,4,7,10")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--stop", choices=("heuristic", "rigorous"), default="heuristic")
    p.add_argument("--gammas", default="1")
    p.add_argument("--eps", default="1e-6", help="comma-separated accuracies")
    p.add_argument("--check-every", type=int, default=20)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="write NA for wall_ms (byte-stable output)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PIDError, ValueError, OSError) as exc:
        print(f"admui: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
