#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernels on the two hot workloads:
sparse homogeneous multiplication (spectral powering) and sparse row
elimination (quotient-norm echelon).

Run from the repository root:  python benchmarks/bench_kernels.py
"""

import random
import statistics
import time

from sectnorm import _kernels_py
from sectnorm.ratio import rat

try:
    from sectnorm import _speedups
except ImportError:
    _speedups = None

from sectnorm.section_algebra import monomial_basis
from sectnorm.valued_arith import GammaValue, Prime
from sectnorm.normed_space import weighted_echelon
from sectnorm.restriction import Subvariety
from helpers_bench import patch_backend  # local shim below


def random_terms(rng, nvars, degree, density=0.8):
    keys = monomial_basis(nvars, degree)
    out = {}
    for k in keys:
        if rng.random() < density:
            u = rng.randrange(1, 16) | 1
            out[k] = rat(rng.choice([u, -u])) * rat(2) ** rng.randint(-3, 3)
    return out


def bench(fn, repeat=5):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def bench_mul(impl, rng_seed=7):
    rng = random.Random(rng_seed)
    a = random_terms(rng, 3, 16)
    b = random_terms(rng, 3, 16)

    def work():
        cur = a
        for _ in range(2):
            cur = impl.mul_terms(cur, cur)
        impl.mul_terms(cur, b)

    return bench(work)


def bench_echelon(impl, rng_seed=7):
    # degree-40 part of a rational-point ideal on P^2: the elimination does
    # real reduction work here, unlike coordinate-aligned hyperplanes
    prime = Prime(2)
    from sectnorm.points_metrics import RationalPoint
    from sectnorm.restriction import _degree_products
    from sectnorm.section_algebra import DiagonalMetric

    Y = Subvariety.at_rational_point(RationalPoint(prime, [1, 2, 3]))
    metric = DiagonalMetric(prime, [GammaValue(0), GammaValue(1), GammaValue(2)])
    rows = _degree_products(Y, 40)
    cache = {}

    def weight_of(key):
        w = cache.get(key)
        if w is None:
            w = metric.weight_of_key(key)
            cache[key] = w
        return w

    def work():
        with patch_backend(impl):
            weighted_echelon(prime, [dict(r) for r in rows], weight_of)

    return bench(work, repeat=3)


def main():
    impls = [("python", _kernels_py)]
    if _speedups is not None:
        impls.append(("compiled", _speedups))
    else:
        print("compiled kernels not built; benchmarking the fallback only")

    print(f"{'workload':<28}{'backend':<10}{'best':>10}{'median':>10}")
    baselines = {}
    for name, impl in impls:
        best, med = bench_mul(impl)
        baselines.setdefault("mul", best)
        speedup = baselines["mul"] / best
        print(f"{'sparse multiply ladder':<28}{name:<10}{best:>9.3f}s{med:>9.3f}s"
              f"  x{speedup:.2f}")
    for name, impl in impls:
        best, med = bench_echelon(impl)
        baselines.setdefault("ech", best)
        speedup = baselines["ech"] / best
        print(f"{'weighted echelon deg 40':<28}{name:<10}{best:>9.3f}s{med:>9.3f}s"
              f"  x{speedup:.2f}")


if __name__ == "__main__":
    main()
