#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Runs the fuzzy filter and the four AVDS variants on one seeded synthetic
plane with both backends and reports best-of-N wall times plus the
speedup. Invoke from a checkout as:

    python3 benchmarks/bench_backends.py --size 512 --repeats 3
"""

import argparse
import sys
import time

import numpy as np

from avdsprep import DistanceKind
from avdsprep._kernels import _pure

try:
    from avdsprep._kernels import _core
except ImportError:
    _core = None


def best_of(repeats, fn):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=512,
                        help="plane side length (default 512)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="take the best of N runs (default 3)")
    parser.add_argument("--k", type=int, default=3,
                        help="AVDS sub-window side (default 3)")
    parser.add_argument("--omega", type=float, default=2.0,
                        help="AVDS weighting exponent (default 2.0)")
    parser.add_argument("--half", type=int, default=1,
                        help="fuzzy window half-width (default 1)")
    parser.add_argument("--seed", type=int, default=20240817)
    args = parser.parse_args(argv)

    if _core is None:
        print("compiled extension not available; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(args.seed)
    pixels = rng.uniform(0.0, 255.0, (args.size, args.size))
    fuzzy_padded = np.pad(pixels, args.half, mode="reflect")
    avds_padded = np.pad(pixels, args.k - 1, mode="reflect")

    cases = [(
        "fuzzy",
        lambda mod: mod.fuzzy_filter(fuzzy_padded, args.half, 25.0, True),
    )]
    for kind in DistanceKind:
        cases.append((
            f"avds-{kind.label}",
            lambda mod, kind=kind: mod.avds_filter(
                avds_padded, args.k, args.omega, int(kind), 16, 1e-9
            ),
        ))

    print(f"plane {args.size}x{args.size}, k={args.k}, omega={args.omega}, "
          f"best of {args.repeats}")
    print(f"{'kernel':<18} {'compiled':>10} {'pure':>10} {'speedup':>9}")
    for name, call in cases:
        compiled = best_of(args.repeats, lambda: call(_core))
        pure = best_of(args.repeats, lambda: call(_pure))
        check = np.max(np.abs(np.asarray(call(_core)) - call(_pure)))
        if check > 1e-9:
            print(f"{name}: backends disagree by {check:g}", file=sys.stderr)
            return 1
        print(f"{name:<18} {compiled:>9.3f}s {pure:>9.3f}s {pure / compiled:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
