#!/usr/bin/env python3
"""Compare the JIT and pure-numpy capacity kernels.

Runs the per-frequency capacity bound over grids of increasing size with
both backends and reports timings.  The JIT path is what the package uses
by default; QUDUCT_DISABLE_NUMBA=1 selects the numpy path everywhere.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from quduct._kernels import USING_NUMBA, _capacity_bound_numpy, capacity_bound_array
from quduct.capacity import ChannelSpec, cap_integrated_quadrature


def time_fn(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not USING_NUMBA:
        print("note: numba backend inactive (QUDUCT_DISABLE_NUMBA set or "
              "numba missing); both columns below run the numpy path")

    rng = np.random.default_rng(0)
    print(f"{'n':>10} {'numpy (ms)':>12} {'active (ms)':>12} {'speedup':>8}")
    for n in (10_000, 100_000, 1_000_000, 4_000_000):
        eta = rng.uniform(0.0, 0.999, size=n)
        n_add = rng.uniform(0.0, 1.2, size=n)
        capacity_bound_array(eta[:64], n_add[:64])  # trigger JIT compile
        t_numpy = time_fn(_capacity_bound_numpy, eta, n_add, repeats=args.repeats)
        t_active = time_fn(capacity_bound_array, eta, n_add, repeats=args.repeats)
        print(
            f"{n:>10} {t_numpy * 1e3:>12.2f} {t_active * 1e3:>12.2f} "
            f"{t_numpy / t_active:>8.2f}x"
        )

    # end-to-end: the quadrature oracle is the heaviest kernel consumer
    spec = ChannelSpec(eta=0.9, n_add=0.5, bandwidth_hz=22e3)
    t = time_fn(cap_integrated_quadrature, spec, repeats=args.repeats)
    print(f"\nquadrature oracle at (0.9, 0.5): {t * 1e3:.2f} ms per call")


if __name__ == "__main__":
    main()
