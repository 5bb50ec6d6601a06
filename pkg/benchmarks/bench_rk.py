"""Time the classical-mode integrator on each available backend.

Run with ``python3 benchmarks/bench_rk.py [--repeat N] [--tmax T]``.
"""
import argparse
import statistics
import time

import numpy as np

from thermobound import _kernels
from thermobound.ode import solve_classical
from thermobound.profiles import FrequencyProfile


def profiles():
    t = np.linspace(0, 60, 121)
    return {
        "constant": FrequencyProfile.constant(1.3),
        "sqrt_linear": FrequencyProfile.sqrt_linear(1.0, 1.0, offset=0.0),
        "paul_trap": FrequencyProfile.paul_trap(),
        "tabulated": FrequencyProfile.tabulated(t, 1 + 0.3 * np.cos(t)),
    }


def median_time(profile, t_max, backend, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        sol = solve_classical(profile, t_max, backend=backend)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), len(sol.grid)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--tmax", type=float, default=50.0)
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}  t_max={args.tmax}  repeat={args.repeat}")
    print(f"{'profile':<12} {'steps':>6} " + " ".join(f"{b + ' [ms]':>14}" for b in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for name, prof in profiles().items():
        row = {b: median_time(prof, args.tmax, b, args.repeat) for b in backends}
        steps = row[backends[0]][1]
        cells = " ".join(f"{1e3 * row[b][0]:>14.2f}" for b in backends)
        extra = ""
        if "python" in row and "cython" in row:
            extra = f"   {row['python'][0] / row['cython'][0]:7.1f}x"
        print(f"{name:<12} {steps:>6} {cells}{extra}")


if __name__ == "__main__":
    main()
