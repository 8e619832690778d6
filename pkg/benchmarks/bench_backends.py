#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python twins.

Micro-benchmarks call both backend modules directly; the end-to-end row
runs the sampling oracle in a subprocess with KL_ANALYZER_BACKEND
forced, so the import-time backend switch is exercised for real.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import subprocess
import sys
import time

import numpy as np

from kl_analyzer.numerics import _pure

try:
    from kl_analyzer.numerics import _core
except ImportError:
    _core = None


def timeit(fn, reps):
    start = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - start) / reps


def bench_kernels(quick):
    rng = np.random.default_rng(0)
    sym = rng.standard_normal((8, 8))
    sym = sym + sym.T
    pts = rng.standard_normal((5, 3))
    mat = rng.standard_normal((12, 12)) + 12.0 * np.eye(12)
    rhs = rng.standard_normal(12)

    n_uni = 20000 if quick else 100000
    cases = [
        ("uniforms[%d]" % n_uni, lambda m: m.uniforms(7, 1, 0, n_uni), 3),
        ("annulus_offsets[5000x2]", lambda m: m.annulus_offsets(7, 0, 5000, 2, 0.05, 0.1), 3),
        ("jacobi_eigen[8x8]", lambda m: m.jacobi_eigen(sym), 50 if quick else 300),
        ("min_norm_point[5x3]", lambda m: m.min_norm_point(pts), 200 if quick else 2000),
        ("solve_linear[12x12]", lambda m: m.solve_linear(mat, rhs), 200 if quick else 2000),
    ]
    print("%-26s %12s %12s %9s" % ("kernel", "python (ms)", "compiled (ms)", "speedup"))
    for name, call, reps in cases:
        t_py = timeit(lambda: call(_pure), reps)
        if _core is None:
            print("%-26s %12.3f %12s %9s" % (name, 1e3 * t_py, "n/a", "n/a"))
            continue
        t_c = timeit(lambda: call(_core), reps)
        print("%-26s %12.3f %12.3f %8.1fx" % (name, 1e3 * t_py, 1e3 * t_c, t_py / t_c))


END_TO_END = r"""
import time
import numpy as np
from kl_analyzer import fixtures, sampler
from kl_analyzer.model import KLQuery
from kl_analyzer.numerics import BACKEND_NAME
q = KLQuery(fixtures.smooth_indefinite(), [0.0, 0.0])
budget = sampler.SampleBudget(0.1, 10, 2000, seed=7)
start = time.perf_counter()
est, records = sampler.estimate_modulus(q, budget)
print("%s %.6f %.9f %d" % (BACKEND_NAME, time.perf_counter() - start, est, len(records)))
"""


def bench_end_to_end():
    print()
    print("end-to-end: estimate_modulus on the indefinite quadratic (22k samples)")
    results = {}
    for backend in ("python", "compiled") if _core is not None else ("python",):
        proc = subprocess.run(
            [sys.executable, "-c", END_TO_END],
            capture_output=True,
            text=True,
            env={"KL_ANALYZER_BACKEND": backend, "PATH": "/usr/bin:/bin"},
        )
        if proc.returncode != 0:
            print("  %s failed: %s" % (backend, proc.stderr.strip()))
            continue
        name, seconds, est, nrec = proc.stdout.split()
        results[name] = float(seconds)
        print("  %-9s %8.3f s   estimate %s over %s records" % (name, float(seconds), est, nrec))
    if len(results) == 2:
        print("  speedup %.1fx" % (results["python"] / results["compiled"]))


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="fewer repetitions")
    args = parser.parse_args()
    if _core is None:
        print("compiled backend not available; showing pure-Python timings only")
    bench_kernels(args.quick)
    bench_end_to_end()
