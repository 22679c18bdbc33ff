"""Time the jitted kernels against their numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--n 256] [--repeats 20]

Covers the two hot pointwise kernels (density recovery, upper-convected
stress assembly) and one full reformulated-system RHS per path.  The RHS
comparison reloads the kernel module under OLDROYD_LAB_NUMBA=0 in a
subprocess so both paths run in pristine processes.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def timeit(fn, repeats):
    fn()  # warm-up (and JIT compile)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_pointwise(n, repeats):
    from oldroyd_lab import kernels

    rng = np.random.default_rng(0)
    X = 1.0 + 0.01 * rng.standard_normal((n, n))
    jac = rng.standard_normal((2, 2, n * n))
    tau = rng.standard_normal((3, n * n))
    eta = rng.standard_normal(n * n)
    divu = rng.standard_normal(n * n)

    rows = []
    t_np = timeit(lambda: kernels.newton_rho_numpy_path(X, 1.0, 1.0, 2.0), repeats)
    if kernels.NUMBA_ENABLED:
        t_nb = timeit(lambda: kernels.newton_rho(X, 1.0, 1.0, 2.0), repeats)
    else:
        t_nb = float("nan")
    rows.append(("newton_rho", t_np, t_nb))

    args = (jac, tau, eta, divu, 0.5, 0.5, 0.0, -0.5, -1.0)
    t_np = timeit(lambda: kernels.sym_stress_rhs_numpy_path(
        jac.reshape(2, 2, n, n), tau.reshape(3, n, n),
        eta.reshape(n, n), divu.reshape(n, n), 0.5, 0.5, 0.0, -0.5, -1.0), repeats)
    if kernels.NUMBA_ENABLED:
        t_nb = timeit(lambda: kernels.sym_stress_rhs(
            jac.reshape(2, 2, n, n), tau.reshape(3, n, n),
            eta.reshape(n, n), divu.reshape(n, n), 0.5, 0.5, 0.0, -0.5, -1.0), repeats)
    else:
        t_nb = float("nan")
    rows.append(("sym_stress_rhs", t_np, t_nb))
    return rows


RHS_SNIPPET = r"""
import json, time
import numpy as np
from oldroyd_lab import kernels
from oldroyd_lab.grid import build_grid
from oldroyd_lab.initial_data import initial_data
from oldroyd_lab.models import rhs_cauchy
from oldroyd_lab.params import DEFAULT_PARAMS

n, repeats = {n}, {repeats}
grid = build_grid(2, n, 2 * np.pi)
state = initial_data("random_smooth", 1e-2, 1, grid, DEFAULT_PARAMS, "cauchy")
rhs_cauchy(state, DEFAULT_PARAMS)
t0 = time.perf_counter()
for _ in range(repeats):
    rhs_cauchy(state, DEFAULT_PARAMS)
print(json.dumps({{"numba": kernels.NUMBA_ENABLED,
                   "seconds": (time.perf_counter() - t0) / repeats}}))
"""


def bench_rhs(n, repeats):
    rows = []
    for flag in ("1", "0"):
        env = dict(os.environ, OLDROYD_LAB_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", RHS_SNIPPET.format(n=n, repeats=repeats)],
            capture_output=True, text=True, env=env, cwd=ROOT, check=True,
        )
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()

    from oldroyd_lab import kernels

    print(f"numba enabled in this process: {kernels.NUMBA_ENABLED}")
    print(f"\npointwise kernels at {args.n}^2 ({args.repeats} repeats):")
    print(f"{'kernel':<18}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>9}")
    for name, t_np, t_nb in bench_pointwise(args.n, args.repeats):
        speed = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print(f"{name:<18}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{speed:>9.2f}")

    print(f"\nfull reformulated-system RHS at {args.n}^2 (fresh processes):")
    for row in bench_rhs(args.n, max(3, args.repeats // 4)):
        path = "numba" if row["numba"] else "numpy"
        print(f"  {path:<6} {row['seconds'] * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
