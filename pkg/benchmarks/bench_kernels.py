"""Timing comparison of the compiled kernel backend vs the numpy fallback.

Run: python benchmarks/bench_kernels.py [--sizes 100,200,400]
The same inputs are fed to both backends and the results are checked to
agree before any timing is reported.
"""
import argparse
import time

import numpy as np

from rmtlab._kernels import _kernels_py as kpy

try:
    from rmtlab._kernels import _kernels_cy as kcy
except ImportError:
    kcy = None


def _time(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_eigensolver(n, reps=3):
    rng = np.random.default_rng(0)
    a = rng.standard_normal((n, n))
    h = (a + a.T) / 2.0
    rows = []
    for label, mod in (("cython", kcy), ("python", kpy)):
        if mod is None:
            continue
        def solve():
            d, e = mod.householder_tridiag(h.copy())
            return mod.tridiag_eigenvalues(
                np.ascontiguousarray(d), np.ascontiguousarray(e))
        vals = np.asarray(solve())
        err = float(np.max(np.abs(vals - np.linalg.eigvalsh(h))))
        assert err < 1e-9, f"{label} backend disagrees with numpy: {err}"
        rows.append((label, _time(solve, reps)))
    return rows


def bench_pairwise(n, reps=20):
    x = np.sort(np.random.default_rng(1).standard_normal(n))
    rows = []
    ref = kpy.pairwise_inverse_sum(x)
    for label, mod in (("cython", kcy), ("python", kpy)):
        if mod is None:
            continue
        assert np.max(np.abs(np.asarray(mod.pairwise_inverse_sum(x)) - ref)) < 1e-9
        rows.append((label, _time(lambda: mod.pairwise_inverse_sum(x), reps)))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="100,200,400")
    sizes = [int(s) for s in ap.parse_args().sizes.split(",")]
    if kcy is None:
        print("compiled backend not available; timing the fallback only")
    for n in sizes:
        print(f"\nn = {n}")
        rows = bench_eigensolver(n)
        base = dict(rows).get("python")
        for label, t in rows:
            speed = f"  ({base / t:.1f}x vs python)" if label == "cython" and base else ""
            print(f"  eigensolver  {label:7s} {t * 1e3:9.2f} ms{speed}")
        rows = bench_pairwise(n)
        base = dict(rows).get("python")
        for label, t in rows:
            speed = f"  ({base / t:.1f}x vs python)" if label == "cython" and base else ""
            print(f"  dbm drift    {label:7s} {t * 1e6:9.1f} us{speed}")


if __name__ == "__main__":
    main()
