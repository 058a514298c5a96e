"""Benchmark the Crank-Nicolson step: compiled kernel vs pure-Python fallback.

Both backends are timed on the same standing-wave state so the comparison is
apples-to-apples; the max pointwise deviation between the two results is also
reported as a parity check.

Usage: python3 benchmarks/bench_step.py [--n 2001] [--steps 1000] [--dt 5e-4]
"""

import argparse
import importlib
import os
import time

import numpy as np


def run_backend(pure_python: bool, n: int, steps: int, dt: float):
    os.environ.pop("ROBIN_DNLS_PURE_PYTHON", None)
    if pure_python:
        os.environ["ROBIN_DNLS_PURE_PYTHON"] = "1"
    import robin_dnls.backend as backend

    importlib.reload(backend)
    import robin_dnls.dynamics as dynamics

    importlib.reload(dynamics)
    from robin_dnls.dynamics import StepperConfig, step
    from robin_dnls.field import Grid
    from robin_dnls.profiles import WaveParams, standing_wave_profile

    p = WaveParams(1.0, -0.5)
    g = Grid(20.0, n)
    v = standing_wave_profile(p, g)
    cfg = StepperConfig(dt=dt)

    # warm up (JIT-free, but touches caches and lazy imports)
    step(v, p, cfg, dt)

    t0 = time.perf_counter()
    for _ in range(steps):
        v = step(v, p, cfg, dt)
    elapsed = time.perf_counter() - t0
    return backend.BACKEND_NAME, elapsed, v.values


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2001, help="grid nodes")
    ap.add_argument("--steps", type=int, default=1000, help="steps to time")
    ap.add_argument("--dt", type=float, default=5e-4, help="time step")
    args = ap.parse_args()

    results = {}
    for pure in (False, True):
        name, elapsed, values = run_backend(pure, args.n, args.steps, args.dt)
        key = "python" if pure else name
        results[key] = (elapsed, values)
        per_step = 1e3 * elapsed / args.steps
        print(f"{key:>8}: {elapsed:8.3f} s total, {per_step:7.3f} ms/step "
              f"(n={args.n}, {args.steps} steps)")

    keys = list(results)
    if len(keys) == 2 and keys[0] != keys[1]:
        (ta, va), (tb, vb) = results[keys[0]], results[keys[1]]
        dev = float(np.max(np.abs(va - vb)))
        print(f"speedup {keys[1]}/{keys[0]}: {tb / ta:.2f}x, "
              f"max state deviation {dev:.3e}")
    else:
        print("compiled kernel unavailable; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
