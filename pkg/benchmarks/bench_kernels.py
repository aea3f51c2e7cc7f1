#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Times the two workloads that dominate the package runtime: rational-gain
evaluation over large frequency grids (peak search / verification grids)
and fixed-step RK4 integration of the closed loop.  Run directly:

    python benchmarks/bench_kernels.py [--grid-points N] [--rk4-steps N]

The production selection between the paths is the ROBINSTAB_NO_NUMBA
environment variable; this script imports both implementations explicitly.
"""

import argparse
import time

import numpy as np

from robinstab import _kernels
from robinstab.models import RepressilatorSpec, repressilator
from robinstab.peaks import local_peaks
from robinstab.rir import rir_verdict
from robinstab.simulate import closed_loop, companion_realization


def _median_time(fn, *args, repeats=7):
    fn(*args)  # warm up (JIT compilation for the numba path)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_gain_grid(n_points):
    g = repressilator(RepressilatorSpec(tau=3.4))
    ws = np.geomspace(1e-4, 1e4, n_points)
    num, den = g.num.coeffs, g.den.coeffs
    t_np = _median_time(_kernels.gain_grid_numpy, num, den, ws)
    if not _kernels.USING_NUMBA:
        return ("gain grid", n_points, t_np, None)
    t_nb = _median_time(_kernels.gain_grid_numba, num, den, ws)
    return ("gain grid", n_points, t_np, t_nb)


def bench_rk4(n_steps):
    g = repressilator(RepressilatorSpec(tau=3.4))
    verdict = rir_verdict(g, peaks=local_peaks(g))
    delta = verdict.certificate.delta.as_tf()
    a_mat, b, c, _ = companion_realization(closed_loop(g, delta))
    dt = 0.004
    t_np = _median_time(_kernels.rk4_lti_numpy, a_mat, b, c, dt, n_steps, repeats=3)
    if not _kernels.USING_NUMBA:
        return ("rk4", n_steps, t_np, None)
    t_nb = _median_time(_kernels.rk4_lti_numba, a_mat, b.copy(), c, dt, n_steps, repeats=3)
    return ("rk4", n_steps, t_np, t_nb)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid-points", type=int, default=1_000_000)
    parser.add_argument("--rk4-steps", type=int, default=50_000)
    args = parser.parse_args()

    rows = [
        bench_gain_grid(args.grid_points),
        bench_rk4(args.rk4_steps),
    ]

    print(f"{'kernel':<12} {'size':>10} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}")
    for name, size, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{name:<12} {size:>10} {t_np * 1e3:>12.2f} {'n/a':>12} {'n/a':>9}")
        else:
            print(
                f"{name:<12} {size:>10} {t_np * 1e3:>12.2f} {t_nb * 1e3:>12.2f} "
                f"{t_np / t_nb:>8.1f}x"
            )
    if not _kernels.USING_NUMBA:
        print("\nROBINSTAB_NO_NUMBA is set: only the numpy fallback was timed.")


if __name__ == "__main__":
    main()
