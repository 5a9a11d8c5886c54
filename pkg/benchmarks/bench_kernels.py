"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run without arguments: spawns one subprocess per implementation (the kernel
backend is chosen at import time via PSLAB_NO_NUMBA) and prints both tables.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def make_workloads(rng):
    mats = rng.normal(size=(200_000, 3, 3))
    # synthetic boundary atoms and lifted orbit points on the hyperboloid
    m, n = 200_000, 500
    ang = rng.uniform(-np.pi, np.pi, size=m)
    zs = np.c_[np.cos(ang), np.sin(ang)]
    ws = rng.uniform(0.0, 1.0, size=m)
    ws /= ws.sum()
    d = rng.uniform(1.0, 12.0, size=n)
    oa = rng.uniform(-np.pi, np.pi, size=n)
    lifts = np.c_[np.sinh(d) * np.cos(oa), np.sinh(d) * np.sin(oa), np.cosh(d)]
    pts = rng.normal(size=(10_000, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return mats, zs, ws, lifts, pts


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def bench(label, fn, repeats=3):
    fn()  # warm-up (includes jit compilation when enabled)
    best = min(_timed(fn) for _ in range(repeats))
    print(f"  {label:<34} {best * 1e3:9.2f} ms")
    return best


def run_suite():
    from pslab import _kernels

    impl = "numpy-fallback" if not _kernels.USE_NUMBA else "numba"
    print(f"backend: {impl}")
    rng = np.random.default_rng(7)
    mats, zs, ws, lifts, pts = make_workloads(rng)
    bench("batch_log_singular_values 200k", lambda: _kernels.batch_log_singular_values(mats))
    bench("shadow_mass_from_origin 500 x 200k",
          lambda: _kernels.shadow_mass_from_origin(lifts, zs, ws, 1.5))
    bench("ray_distances_lifted 200k",
          lambda: _kernels.ray_distances_lifted(np.repeat(lifts, 100, axis=0),
                                                np.array([1.0, 0.0])))
    bench("greedy_cover_count 10k chordal",
          lambda: _kernels.greedy_cover_count(pts, 0.05, _kernels.METRIC_CHORDAL))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--impl", choices=["numba", "numpy"])
    args = parser.parse_args()
    if args.impl:
        run_suite()
        return
    for impl, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, PSLAB_NO_NUMBA=flag)
        subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--impl", impl],
            env=env, check=True,
        )


if __name__ == "__main__":
    main()
