"""Compare the compiled and pure-Python GIS backends.

Times single I-projections on random targets and full union-information
solves on seeded 2x2x2 and 3x3x3 instances, checks that both backends
agree, and prints a small table.  Usage::

    python benchmarks/bench_backends.py [--count 20] [--seed 0]
"""

import argparse
import time

import numpy as np

from admui import SolverConfig, admui, using_backend
from admui._kernels import BACKENDS
from admui.iprojection import DistanceStop, ProjectionTarget, i_project
from admui.probkit import MarginalPair, gen_simplex_uniform


def _timed(fn, repeat=3):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def projections(rng, count, n):
    targets = [ProjectionTarget(rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))) for _ in range(count)]
    r = np.full((n, n), 1.0 / n**2)
    return lambda: [i_project(r, t, 1.0, DistanceStop(1e-10)).q.probs for t in targets]


def solves(sizes, count, seed):
    pairs = [MarginalPair.from_joint(d.pmf) for d in gen_simplex_uniform(sizes, seed, count)]
    cfg = SolverConfig(epsilon=1e-6)
    return lambda: [float(admui(m, cfg).union_information) for m in pairs]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if "cython" not in BACKENDS:
        raise SystemExit("compiled backend not built; run `pip install -e .` with Cython available")
    cases = {
        "projection 3x3": projections(np.random.default_rng(args.seed), args.count, 3),
        "projection 10x10": projections(np.random.default_rng(args.seed), args.count, 10),
        "solve 2x2x2": solves((2, 2, 2), args.count, args.seed),
        "solve 3x3x3": solves((3, 3, 3), args.count // 4 or 1, args.seed),
    }
    print(f"{'case':<18}{'python ms':>12}{'cython ms':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, fn in cases.items():
        with using_backend("python"):
            t_py, out_py = _timed(fn, repeat=1)
        with using_backend("cython"):
            t_c, out_c = _timed(fn)
        diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) for a, b in zip(out_py, out_c))
        print(f"{name:<18}{t_py * 1e3:>12.1f}{t_c * 1e3:>12.1f}{t_py / t_c:>10.1f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
