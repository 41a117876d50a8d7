"""Time the numba and numpy A_n kernels on the same points.

    python benchmarks/bench_an_backends.py [--repeat 3]

The first numba call compiles (or loads the on-disk cache); that cost is
reported separately from the steady-state timings.
"""
import argparse
import time

import numpy as np

from rootsharp._accel import HAVE_NUMBA
from rootsharp._an_kernels import psi

CASES = [
    # (n, k, nodes)
    (1, 1.0, 32),
    (1, 0.5, 32),
    (2, 1.0, 16),
    (2, 2.0, 16),
    (3, 1.0, 8),
]


def _points(n, count, seed=0):
    rng = np.random.default_rng(seed)
    lam = np.cumsum(rng.uniform(0.05, 5.0, (count, n + 1)), axis=1)[:, ::-1]
    gaps = rng.uniform(0.02, 4.0, (count, n))
    return lam, gaps


def _time(backend, k, m, lam, gaps, repeat):
    best = np.inf
    vals = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        vals = np.array([psi(l, g, k, m, backend) for l, g in zip(lam, gaps)])
        best = min(best, time.perf_counter() - t0)
    return best, vals


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--count", type=int, default=20)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels can run")
    print(f"{'n':>2} {'k':>4} {'nodes':>5} {'numpy s':>9} {'numba s':>9} {'speedup':>8} {'max |diff|':>11}")
    for n, k, m in CASES:
        lam, gaps = _points(n, args.count)
        count = args.count if n < 3 else max(2, args.count // 10)
        lam, gaps = lam[:count], gaps[:count]
        t_np, v_np = _time("numpy", k, m, lam, gaps, args.repeat)
        if not HAVE_NUMBA:
            print(f"{n:>2} {k:>4} {m:>5} {t_np:9.3f}")
            continue
        t0 = time.perf_counter()
        psi(lam[0], gaps[0], k, m, "numba")
        warm = time.perf_counter() - t0
        t_nb, v_nb = _time("numba", k, m, lam, gaps, args.repeat)
        diff = float(np.max(np.abs(v_np - v_nb)))
        print(f"{n:>2} {k:>4} {m:>5} {t_np:9.3f} {t_nb:9.3f} {t_np / t_nb:8.1f} {diff:11.2e}"
              f"   (first numba call {warm:.2f} s)")


if __name__ == "__main__":
    main()
