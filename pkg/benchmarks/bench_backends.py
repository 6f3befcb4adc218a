"""Benchmark the compiled kernels against the pure numpy fallback.

Run as:  python3 benchmarks/bench_backends.py [--quick]

Both backends draw from the same Philox stream layout, so the comparison
is like for like (their outputs are bit-identical); see test_kernels.py.
"""

import argparse
import time

import numpy as np

from pmeans._kernels import _pyfallback
from pmeans.sampling import RngStream

try:
    from pmeans._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(label, make_args, quick):
    rows = []
    backends = [("numpy fallback", _pyfallback)]
    if _core is not None:
        backends.insert(0, ("cython", _core))
    times = {}
    for name, mod in backends:
        args, kernel = make_args(mod)
        times[name] = timeit(lambda: kernel(*args), repeats=2 if quick else 3)
    base = times.get("numpy fallback", float("nan"))
    for name, t in times.items():
        rows.append((label, name, t, base / t if t else float("nan")))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()
    scale = 10 if args.quick else 1

    workloads = []

    def pmean_args(mod, alpha, theta, tol, n):
        gen = RngStream(1, 0).generator
        return (
            (alpha, theta, tol, 10**7, n, 1, np.array([0.4]), 0.4, gen),
            mod.gem_pmean_batch,
        )

    workloads.append(
        (
            "gem_pmean_batch (0, 2) tol 1e-8, n=%d" % (200_000 // scale),
            lambda mod: pmean_args(mod, 0.0, 2.0, 1e-8, 200_000 // scale),
        )
    )
    workloads.append(
        (
            "gem_pmean_batch (0.5, 1) tol 2e-3, n=%d" % (50_000 // scale),
            lambda mod: pmean_args(mod, 0.5, 1.0, 2e-3, 50_000 // scale),
        )
    )

    workloads.append(
        (
            "gem_weights_batch (0, 1) tol 1e-10, n=%d" % (100_000 // scale),
            lambda mod: (
                (0.0, 1.0, 1e-10, 10**7, 100_000 // scale, RngStream(2, 0).generator),
                mod.gem_weights_batch,
            ),
        )
    )
    workloads.append(
        (
            "crp_kn_batch (0.5, 0.5) n=8, reps=%d" % (200_000 // scale),
            lambda mod: (
                (0.5, 0.5, 8, 200_000 // scale, RngStream(3, 0).generator),
                mod.crp_kn_batch,
            ),
        )
    )

    print(f"{'workload':<48} {'backend':<16} {'seconds':>9} {'speedup':>8}")
    print("-" * 84)
    for label, make in workloads:
        for row in bench(label, make, args.quick):
            print(f"{row[0]:<48} {row[1]:<16} {row[2]:>9.3f} {row[3]:>7.2f}x")


if __name__ == "__main__":
    main()
