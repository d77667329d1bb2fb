#!/usr/bin/env python3
"""Benchmark the compiled series kernel against the pure-Python fallback.

Times the workloads that dominate real runs: raw branch evaluations, a full
G scan over an x grid, and a spectrum solve.  Run after building the
extension (pip install -e . --no-build-isolation):

    python benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from anirabi.model import ModelParams, derive_constants

try:
    from anirabi import _kernel_cy
except ImportError:
    _kernel_cy = None
from anirabi import _kernel_py

PARAMS = ModelParams(
    omega=1.0, delta=0.4, g=0.7, lam=0.5, epsilon=0.2, theta=-math.pi / 2
)
XS = np.linspace(-1.0, 6.0, 2800)


def time_branch(kernel, repeats=3):
    cons = derive_constants(PARAMS)
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for x in XS:
            kernel.branch_series(
                PARAMS.omega, PARAMS.g, PARAMS.lam, cons.xi, cons.c, cons.f,
                float(x), False, 250, 1e-14, 1e-9,
            )
            kernel.branch_series(
                PARAMS.omega, PARAMS.g, PARAMS.lam, cons.xi, cons.c, cons.fbar,
                float(x), True, 250, 1e-14, 1e-9,
            )
        best = min(best, time.perf_counter() - t0)
    return best


def time_solve(backend_env):
    import os
    import subprocess
    import sys

    code = (
        "import time, math;"
        "from anirabi.model import ModelParams;"
        "from anirabi.spectrum import solve_spectrum;"
        "p = ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5,"
        "                epsilon=0.2, theta=-math.pi/2);"
        "t0 = time.perf_counter();"
        "solve_spectrum(p, n_levels=8);"
        "print(time.perf_counter() - t0)"
    )
    env = dict(os.environ, ANIRABI_BACKEND=backend_env)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True,
        check=True,
    )
    return float(out.stdout.strip())


def main():
    print(f"branch evaluations over {len(XS)} x points, both branches:")
    t_py = time_branch(_kernel_py)
    print(f"  python   {t_py * 1e3:9.1f} ms")
    if _kernel_cy is not None:
        t_cy = time_branch(_kernel_cy)
        print(f"  compiled {t_cy * 1e3:9.1f} ms   ({t_py / t_cy:.1f}x speedup)")
    else:
        print("  compiled kernel not built; skipping")

    print("full 8-level spectrum solve (fresh process per backend):")
    t_solve_py = time_solve("python")
    print(f"  python   {t_solve_py * 1e3:9.1f} ms")
    if _kernel_cy is not None:
        t_solve_cy = time_solve("compiled")
        print(
            f"  compiled {t_solve_cy * 1e3:9.1f} ms   "
            f"({t_solve_py / t_solve_cy:.1f}x speedup)"
        )


if __name__ == "__main__":
    main()
