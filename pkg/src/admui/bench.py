"""Batch runs over seeded random instances and COPY distributions.

Instances are distributed over a process pool; rows always come back in
input order, so the output depends only on the seeds and options.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import SolverConfig, admui
from .probkit import LN2, MarginalPair, gen_copy, gen_simplex_uniform, mi_table

COLUMNS = ("instance", "size", "gamma", "stop_mode", "eps", "ui_bits", "outer_iters", "inner_iters", "wall_ms")
COPY_COLUMNS = COLUMNS + ("error_bits",)


def map_ordered(fn, tasks, jobs: int = 1) -> list:
    """``list(map(fn, tasks))``, fanned out over ``jobs`` processes."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


@dataclass(frozen=True)
class Task:
    instance: str
    size: str
    table: np.ndarray
    configs: tuple  # SolverConfig per row
    truth_bits: float | None = None


def _solve_task(task: Task) -> list:
    marginals = MarginalPair.from_joint(task.table)
    mi_sz = mi_table(task.table.sum(axis=1))
    rows = []
    for cfg in task.configs:
        t0 = time.perf_counter()
        out = admui(marginals, cfg)
        ms = (time.perf_counter() - t0) * 1e3
        ui_bits = max(float(out.union_information) - mi_sz, 0.0) / LN2
        row = {
            "instance": task.instance,
            "size": task.size,
            "gamma": cfg.gamma,
            "stop_mode": cfg.stop_mode.value,
            "eps": cfg.epsilon,
            "ui_bits": ui_bits,
            "outer_iters": out.outer_iterations,
            "inner_iters": out.inner_iterations_total,
            "wall_ms": ms,
            "status": out.status.value,
        }
        if task.truth_bits is not None:
            row["error_bits"] = abs(ui_bits - task.truth_bits)
        rows.append(row)
    return rows


def _configs(gammas, eps_list, stop_mode, check_every, max_iter):
    return tuple(
        SolverConfig(epsilon=e, gamma=g, stop_mode=stop_mode, check_cadence=check_every, max_outer_iter=max_iter)
        for e in eps_list
        for g in gammas
    )


def random_tasks(sizes_list, count, seed, stop_mode="heuristic", gammas=(1.0,), eps_list=(1e-6,),
                 check_every=1, max_iter=100_000) -> list:
    cfgs = _configs(gammas, eps_list, stop_mode, check_every, max_iter)
    tasks = []
    for sizes in sizes_list:
        label = "x".join(str(n) for n in sizes)
        for i, d in enumerate(gen_simplex_uniform(sizes, seed, count)):
            tasks.append(Task(f"r{i:04d}", label, np.array(d.pmf), cfgs))
    return tasks


def copy_tasks(ks, stop_mode="heuristic", eps_list=(1e-3, 1e-5, 1e-8), gammas=(1.0,), check_every=1,
               max_iter=100_000) -> list:
    cfgs = _configs(gammas, eps_list, stop_mode, check_every, max_iter)
    return [Task(f"copy{k}", f"{k * k}x{k}x{k}", np.array(gen_copy(k).pmf), cfgs, truth_bits=math.log2(k)) for k in ks]


def run_tasks(tasks, jobs: int = 1) -> list:
    return [row for rows in map_ordered(_solve_task, tasks, jobs) for row in rows]


def summary_rows(rows) -> list:
    """Mean of the numeric columns per (size, gamma, stop_mode, eps)."""
    groups = {}
    for r in rows:
        groups.setdefault((r["size"], r["gamma"], r["stop_mode"], r["eps"]), []).append(r)
    out = []
    for (size, gamma, stop, eps), rs in groups.items():
        row = {"instance": "mean", "size": size, "gamma": gamma, "stop_mode": stop, "eps": eps}
        for k in ("ui_bits", "outer_iters", "inner_iters", "wall_ms", "error_bits"):
            if k in rs[0]:
                row[k] = float(np.mean([r[k] for r in rs]))
        out.append(row)
    return out


def _cell(value, timing: bool, key: str) -> str:
    if key == "wall_ms" and not timing:
        return "NA"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_tsv(rows, columns=COLUMNS, timing: bool = True) -> str:
    lines = ["\t".join(columns)]
    for r in rows:
        lines.append("\t".join(_cell(r.get(c, ""), timing, c) for c in columns))
    return "\n".join(lines) + "\n"
