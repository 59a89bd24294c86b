"""Time the compiled RK4 kernel against the pure-Python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernel.py [--duration-ns 150] [--repeats 3]

The two kernels step the same 8-state system; the report shows wall time,
steps per second, and the speedup ratio.  Without the compiled extension
the script times only the fallback.
"""

import argparse
import math
import time

import numpy as np

from synthrot import CircuitParams, DriveSpec, SimSettings, design_rates, simulate
from synthrot.timedomain import HAVE_COMPILED

TWO_PI = 2.0 * math.pi


def reference_problem(duration: float):
    params = CircuitParams(l=0.5e-9, c=2e-12, r=50.0, epsilon=1.0,
                           omega_mod=6.25e8)
    omega0, _, _ = design_rates(params.l, params.c, params.r, params.epsilon)
    drive = DriveSpec(port=1, amplitude=1e-6, omega_d=omega0)
    settings = SimSettings(duration=duration, steps_per_period=80,
                           discard=min(20e-9, 0.4 * duration))
    return params, drive, settings


def time_once(params, drive, settings, use_compiled: bool) -> tuple:
    t0 = time.perf_counter()
    series = simulate(params, drive, settings, use_compiled=use_compiled)
    dt = time.perf_counter() - t0
    return dt, series


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--duration-ns", type=float, default=150.0)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    duration = args.duration_ns * 1e-9
    params, drive, settings = reference_problem(duration)

    rows = []
    fallback_best = math.inf
    for _ in range(args.repeats):
        dt, py_series = time_once(params, drive, settings, use_compiled=False)
        fallback_best = min(fallback_best, dt)
    rows.append(("pure python", fallback_best))
    n_steps = py_series.n_samples - 1

    print(f"problem: {n_steps} RK4 steps of the 8-state lab-frame system")
    print(f"repeats: {args.repeats} (best shown)")

    if HAVE_COMPILED:
        compiled_best = math.inf
        for _ in range(args.repeats):
            dt, c_series = time_once(params, drive, settings,
                                     use_compiled=True)
            compiled_best = min(compiled_best, dt)
        rows.append(("compiled", compiled_best))
        drift = float(np.max(np.abs(c_series.v_out - py_series.v_out)))
        scale = float(np.max(np.abs(py_series.v_out)))
        print(f"kernel agreement: max |dV| = {drift:.3e} "
              f"({drift / scale:.2e} of peak)")
    else:
        print("compiled extension not available; timing fallback only")

    print()
    print(f"{'kernel':<14}{'best [s]':>12}{'steps/s':>14}")
    for name, best in rows:
        print(f"{name:<14}{best:>12.4f}{n_steps / best:>14.3e}")
    if HAVE_COMPILED and fallback_best > 0:
        print(f"\nspeedup: {fallback_best / compiled_best:.1f}x")


if __name__ == "__main__":
    main()
