"""Timing comparison of the compiled and pure-Python numerical cores.

Per-primitive microbenchmarks plus an end-to-end Gibbs sweep, printed
as one table.  Run from the repository root:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --size 48 --repeats 2000
"""

import argparse
import time

import numpy as np

from detclust import _backend
from detclust.kernels import KernelParams, gram_matrix
from detclust.linalg import cache_from_matrix, inverse_add_point, inverse_remove_point
from detclust.partitions import ClusterState, LabelConstraints
from detclust.sampler import gibbs_sweep


def _time(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def build_cases(size, repeats, seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(size, 3))
    params = KernelParams.squared_exponential([1.0, 1.2, 0.8])
    x = rng.normal(size=3)
    gram = gram_matrix(pts, None, params)
    cache = cache_from_matrix(gram)
    cross = gram_matrix(pts, x.reshape(1, -1), params)[:, 0]
    inv_ls = np.ones(3)

    sweep_pts = rng.normal(size=(size, 3))

    def run_sweep():
        state = ClusterState.from_assignment(
            sweep_pts, [i % 4 for i in range(size)], params)
        gibbs_sweep(state, params, LabelConstraints.none(),
                    np.random.default_rng(0))

    core = lambda: _backend.core
    return {
        f"se_gram {size}x{size}": (
            lambda: core().se_gram(pts, inv_ls), repeats),
        f"se_cross n={size}": (
            lambda: core().se_cross(pts, x, inv_ls), repeats * 10),
        f"quad_form n={size}": (
            lambda: core().quad_form(cache.inverse, cross), repeats * 10),
        f"chol_logdet_inv {size}x{size}": (
            lambda: core().chol_logdet_inv(gram), repeats),
        "add+remove point": (
            lambda: inverse_remove_point(
                inverse_add_point(cache, cross, 1.0), size), repeats),
        f"gibbs sweep n={size}": (run_sweep, max(1, repeats // 50)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=32, help="cluster/problem size")
    ap.add_argument("--repeats", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = ["python"]
    try:
        from detclust import _core  # noqa: F401

        backends.append("compiled")
    except ImportError:
        print("compiled backend not built; timing the python backend only")

    cases = build_cases(args.size, args.repeats, args.seed)
    results = {}
    for name in backends:
        _backend.use_backend(name)
        results[name] = {
            label: _time(fn, reps) for label, (fn, reps) in cases.items()}

    width = max(len(k) for k in cases)
    header = f"{'benchmark':<{width}}  " + "".join(f"{b:>14}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label in cases:
        row = f"{label:<{width}}  "
        for b in backends:
            row += f"{results[b][label] * 1e6:>12.1f}us"
        if len(backends) == 2:
            row += f"{results['python'][label] / results['compiled'][label]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
