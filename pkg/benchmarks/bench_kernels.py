"""Compare the compiled assignment kernel against the NumPy fallback.

Run with:  python3 benchmarks/bench_kernels.py

Both backends must agree bit-for-bit (asserted here as well as in the
test suite); the benchmark reports wall-clock timings for the pairwise
distance and assignment kernels at sizes typical for elbow analysis.
"""

from __future__ import annotations

import time

import numpy as np

from ctfminer import _kernels
from ctfminer._kernels import core_py

try:
    from ctfminer._kernels import core_cy
except ImportError:
    core_cy = None


def bench(fn, *args, repeats: int = 20) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    print(f"active backend: {_kernels.BACKEND}")
    if core_cy is None:
        print("compiled kernel unavailable; benchmarking fallback only")
    rng = np.random.default_rng(7)
    cases = [
        (52, 18, 3),    # one cohort, default grid, k=3
        (200, 60, 8),   # large class, fine grid
        (1000, 120, 12),
    ]
    header = f"{'n':>6} {'dim':>4} {'k':>3} | {'numpy ms':>9} {'cython ms':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n, d, k in cases:
        x = rng.normal(size=(n, d))
        c = rng.normal(size=(k, d))
        t_py = bench(core_py.assign, x, c)
        if core_cy is not None:
            t_cy = bench(core_cy.assign, x, c)
            lp, dp = core_py.assign(x, c)
            lc, dc = core_cy.assign(x, c)
            assert np.array_equal(lp, lc) and np.array_equal(dp, dc), "backend mismatch"
            print(f"{n:>6} {d:>4} {k:>3} | {t_py * 1e3:>9.3f} {t_cy * 1e3:>10.3f} "
                  f"{t_py / t_cy:>7.1f}x")
        else:
            print(f"{n:>6} {d:>4} {k:>3} | {t_py * 1e3:>9.3f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
