#!/usr/bin/env python3
"""Benchmark the compiled draw kernels against the numpy fallback.

Both backends consume the identical random stream, so this is a pure
throughput comparison. Draws run through the same fixed chunking the
library uses, so fallback buffer sizes stay bounded. Run:

    python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

from dp_invariance._kernels import BACKEND, _fallback
from dp_invariance.rng import bit_generator, chunk_ranges

try:
    from dp_invariance._kernels import _core
except ImportError:
    _core = None


def chunked_draws(impl, values, n_draws, quantile=None):
    out = np.empty(n_draws)
    for c, start, stop in chunk_ranges(n_draws, values.shape[0]):
        bg = bit_generator(7, c)
        if quantile is None:
            out[start:stop] = impl.exp_ratio_draws(bg, values, stop - start)
        else:
            out[start:stop] = impl.exp_quantile_draws(bg, values, quantile, stop - start)
    return out


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(label, n_obs, n_draws, quantile=None):
    values = np.sort(np.random.default_rng(0).normal(size=n_obs))
    timings = {}
    for name, impl in (("compiled", _core), ("python", _fallback)):
        if impl is None:
            continue
        timings[name] = time_call(lambda: chunked_draws(impl, values, n_draws, quantile))
        print(f"  {label:28s} {name:9s} {timings[name]:8.3f}s")
    if "compiled" in timings and "python" in timings:
        print(f"  {label:28s} speedup   {timings['python'] / timings['compiled']:7.2f}x")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args()

    scale = 10 if args.quick else 1
    print(f"active backend at import: {BACKEND}")
    if _core is None:
        print("compiled kernels not built; showing fallback only")
    print()
    print("mean draws (exp_ratio_draws):")
    bench_case(f"n=1e6, draws={1000 // scale}", 1_000_000, 1000 // scale)
    bench_case(f"n=1e4, draws={20_000 // scale}", 10_000, 20_000 // scale)
    bench_case(f"n=200, draws={200_000 // scale}", 200, 200_000 // scale)
    print()
    print("quantile draws (exp_quantile_draws, q=0.5):")
    bench_case(f"n=1e5, draws={5_000 // scale}", 100_000, 5_000 // scale, quantile=0.5)
    bench_case(f"n=1e3, draws={50_000 // scale}", 1_000, 50_000 // scale, quantile=0.5)


if __name__ == "__main__":
    main()
