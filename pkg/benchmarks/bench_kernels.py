"""Time the compiled and numpy quadrature kernels on the same workload.

    python3 benchmarks/bench_kernels.py --n 3 --res 32 --kmax 6
"""

import argparse
import time

import numpy as np

from sphere_fourier import kernels
from sphere_fourier.harmonics import HarmonicBasis
from sphere_fourier.sphere import random_points, sphere_grid


def workload(n, res, kmax, points, rhos):
    grid = sphere_grid(n, res)
    basis = HarmonicBasis(n, kmax)
    values = np.concatenate([basis.evaluate(k, grid.cart) for k in range(kmax + 1)])
    dirs = np.array([p.cart for p in random_points(n, points, seed=0)])
    return values, grid.weights, grid.cart, dirs, np.asarray(rhos, dtype=float)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--res", type=int, default=32)
    ap.add_argument("--kmax", type=int, default=6)
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--rhos", type=float, nargs="+", default=[0.5, 1.0, 2.0, 5.0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    args_ = workload(args.n, args.res, args.kmax, args.points, args.rhos)
    F, N = args_[0].shape
    print(f"workload: {F} functions x {N} nodes x {args.points} points x {len(args.rhos)} radii, "
          f"threads={kernels.thread_count()}")
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    results = {}
    for b in backends:
        t, out = best_of(lambda: kernels.plane_wave_moments(*args_, backend=b), args.repeat)
        results[b] = (t, out)
        print(f"  {b:<7} {t:8.3f} s")
    if "cython" in results:
        diff = np.max(np.abs(results["cython"][1] - results["python"][1]))
        print(f"  speedup {results['python'][0] / results['cython'][0]:.2f}x, max |difference| {diff:.1e}")
    else:
        print("  compiled kernels not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
