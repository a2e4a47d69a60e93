"""Timing comparison of the njit hot loops against their numpy twins.

Run:  python3 benchmarks/bench_kernels.py
The jit path warms up once before timing so compilation is excluded.
Set BERGMAN_DISABLE_NUMBA=1 to verify the package falls back cleanly
(both columns then time the same numpy implementation).
"""

from __future__ import annotations

import math
import time

import numpy as np

from bergman._accel import (
    USING_NUMBA,
    ring_point_sums,
    ring_point_sums_numpy,
    ym_ring_scan,
    ym_ring_scan_numpy,
)


def _time(fn, *args, repeats: int = 3) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_ring_point_sums() -> None:
    print("ring_point_sums: per-hole sums over one ring")
    print(f"{'holes':>12} {'selected (s)':>14} {'numpy (s)':>12} {'ratio':>8}")
    z = complex(0.02, 0.013)
    for count in (10_000, 1_000_000, 10_000_000):
        x = 0.03
        r2 = 1e-30
        ring_point_sums(z, x, count, r2)  # warm-up / compile
        t_sel = _time(ring_point_sums, z, x, count, r2)
        t_np = _time(ring_point_sums_numpy, z, x, count, r2)
        a = ring_point_sums(z, x, count, r2)
        b = ring_point_sums_numpy(z, x, count, r2)
        rel = max(
            abs(a[0] - b[0]) / abs(b[0]),
            abs(a[1] - b[1]) / abs(b[1]),
        )
        assert rel < 1e-9, f"paths disagree: rel={rel}"
        print(f"{count:>12} {t_sel:>14.6f} {t_np:>12.6f} {t_np / t_sel:>8.2f}")


def bench_ym_ring_scan() -> None:
    print("\nym_ring_scan: grouped ring sums on a probe-radius grid")
    print(f"{'grid':>12} {'selected (s)':>14} {'numpy (s)':>12} {'ratio':>8}")
    for m_count, n_count in ((200, 2_000), (2_000, 20_000), (5_000, 100_000)):
        n = np.arange(2, n_count + 2, dtype=np.float64)
        x = n**-5
        y = 0.5 * (x[: 2 * m_count : 2] + x[1 : 2 * m_count + 1 : 2])
        counts = n**5
        log_r = -(n**3)  # holes far smaller than the ring gaps
        ym_ring_scan(y, x, counts, log_r)  # warm-up / compile
        t_sel = _time(ym_ring_scan, y, x, counts, log_r)
        t_np = _time(ym_ring_scan_numpy, y, x, counts, log_r)
        a = ym_ring_scan(y, x, counts, log_r)
        b = ym_ring_scan_numpy(y, x, counts, log_r)
        rel = max(
            float(np.max(np.abs(a[0] - b[0]) / np.abs(b[0]))),
            float(np.max(np.abs(a[1] - b[1]) / np.maximum(np.abs(b[1]), 1.0))),
        )
        assert rel < 1e-9, f"paths disagree: rel={rel}"
        print(f"{m_count}x{n_count:>7} {t_sel:>14.6f} {t_np:>12.6f} {t_np / t_sel:>8.2f}")


if __name__ == "__main__":
    print(f"numba active: {USING_NUMBA}\n")
    bench_ring_point_sums()
    bench_ym_ring_scan()
