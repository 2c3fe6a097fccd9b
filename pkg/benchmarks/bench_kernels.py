"""Compiled kernels versus the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 16 64 256 512] [--repeat 5]

Prints the best-of-``repeat`` wall time per call and the speedup. Results of
both backends are compared on every input before timing.
"""

import argparse
import timeit

import numpy as np

from lipfree import _kernels_py as py
from lipfree import generators as gen

try:
    from lipfree import _kernels as ext
except ImportError:  # pragma: no cover
    ext = None


def cases(n, rng):
    X = gen.random_space(rng, n, kind="euclidean")
    d = np.ascontiguousarray(X.dist, dtype=np.float64)
    f = rng.uniform(-1, 1, n)
    F = rng.uniform(-1, 1, (32, n))
    return {
        "lipschitz_number": (lambda k: k.lipschitz_number(f, d)),
        "lipschitz_argmax": (lambda k: k.lipschitz_argmax(f, d)),
        "lipschitz_many[32]": (lambda k: k.lipschitz_many(F, d)),
        "triangle_check": (lambda k: k.first_triangle_violation(d, 1e-9, 1e-12)),
        "convexity_scan": (lambda k: k.convexity_scan(d, 0.0)),
    }


def best(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 64, 256, 512])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-cubic-above", type=int, default=256, help="skip O(n^3) kernels above this size in the fallback")
    args = ap.parse_args(argv)
    if ext is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    rng = gen.rng_for(0, "bench")
    print(f"{'kernel':<20} {'n':>5} {'cython (s)':>12} {'numpy (s)':>12} {'speedup':>9}")
    for n in args.sizes:
        for name, call in cases(n, rng).items():
            a, b = call(ext), call(py)
            if not np.array_equal(np.asarray(a, dtype=object), np.asarray(b, dtype=object)):
                raise SystemExit(f"{name} n={n}: backends disagree ({a!r} vs {b!r})")
            cubic = name in ("triangle_check", "convexity_scan")
            tc = best(lambda: call(ext), args.repeat)
            if cubic and n > args.skip_cubic_above:
                print(f"{name:<20} {n:>5} {tc:>12.3e} {'skipped':>12} {'':>9}")
                continue
            tp = best(lambda: call(py), args.repeat)
            print(f"{name:<20} {n:>5} {tc:>12.3e} {tp:>12.3e} {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
