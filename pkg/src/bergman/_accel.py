"""Hot numeric loops with numba and pure-numpy twins.

The construction-scale reports sum kernel-bound terms over every hole of
every ring (up to ~1e8 hole visits for the brute paths) and scan a dense
(m, n) grid of ring interactions.  Both loops ship in two versions: an
njit one and a vectorized numpy one.  Set BERGMAN_DISABLE_NUMBA=1 to force
the numpy path; parity of the two is covered by tests and measured by
benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "USING_NUMBA",
    "ring_point_sums",
    "ring_point_sums_numpy",
    "ym_ring_scan",
    "ym_ring_scan_numpy",
]

_DISABLE = os.environ.get("BERGMAN_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

try:  # pragma: no cover - exercised through the selected alias
    if _DISABLE:
        raise ImportError("numba disabled by BERGMAN_DISABLE_NUMBA")
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def ring_point_sums_numpy(
    z: complex, x: float, count: int, r2: float, chunk: int = 1 << 20
):
    """Sums over the `count` hole centers x*exp(2 pi i j/count) of a ring.

    Returns (sum_j 1/d_j^2, sum_j 1/(d_j^2 - r2)^2) with d_j = |z - c_j|.
    r2 is the squared hole radius as a float; pass 0.0 when it underflows
    (the difference d^2 - r2 is then exact anyway).
    """
    az2 = z.real * z.real + z.imag * z.imag
    s2 = 0.0
    s4 = 0.0
    for start in range(0, count, chunk):
        j = np.arange(start, min(start + chunk, count), dtype=np.float64)
        theta = (2.0 * math.pi / count) * j
        d2 = az2 + x * x - 2.0 * x * (z.real * np.cos(theta) + z.imag * np.sin(theta))
        s2 += float(np.sum(1.0 / d2))
        s4 += float(np.sum(1.0 / (d2 - r2) ** 2))
    return s2, s4


@njit(cache=True, parallel=True)
def _ring_point_sums_jit(zre, zim, x, count, r2):  # pragma: no cover - jit
    az2 = zre * zre + zim * zim
    step = 2.0 * math.pi / count
    s2 = 0.0
    s4 = 0.0
    for j in prange(count):
        theta = step * j
        d2 = az2 + x * x - 2.0 * x * (zre * math.cos(theta) + zim * math.sin(theta))
        s2 += 1.0 / d2
        s4 += 1.0 / ((d2 - r2) * (d2 - r2))
    return s2, s4


def _ring_point_sums_numba(z: complex, x: float, count: int, r2: float, chunk: int = 0):
    return _ring_point_sums_jit(float(z.real), float(z.imag), float(x), int(count), float(r2))


def ym_ring_scan_numpy(y: np.ndarray, x: np.ndarray, counts: np.ndarray, log_r: np.ndarray):
    """Grouped kernel-bound sums over rings, for each probe radius y_m.

    For each m returns
      main[m] = sum_n counts[n] / ((y_m - x_n)^2 * (-log_r[n]))
      rlog[m] = log sum_n counts[n] * r_n^2 / ((y_m - x_n)^2 - r_n^2)^2
    with the r_n^2 terms accumulated in log-space (r_n = exp(log_r[n]) is
    allowed to underflow; (y-x)^2 - r^2 is then exactly (y-x)^2).
    """
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)[None, :]
    counts = np.asarray(counts, dtype=np.float64)[None, :]
    log_r = np.asarray(log_r, dtype=np.float64)[None, :]
    main = np.empty(y.shape[0])
    rlog = np.empty(y.shape[0])
    # Blocked over probe radii: the full (m, n) matrix would need tens of
    # gigabytes at report scale.
    block = max(1, (1 << 22) // max(1, x.shape[1]))
    with np.errstate(under="ignore"):
        log_c = np.log(counts)
        r2 = np.exp(2.0 * log_r)
        for lo in range(0, y.shape[0], block):
            yb = y[lo : lo + block, None]
            gap2 = (yb - x) ** 2
            if np.any(gap2 <= 0):
                raise ValueError("probe radius collides with a ring radius")
            main[lo : lo + block] = np.sum(counts / (gap2 * (-log_r)), axis=1)
            term_log = log_c + 2.0 * log_r - 2.0 * np.log(gap2 - r2)
            hi = np.max(term_log, axis=1, keepdims=True)
            rlog[lo : lo + block] = hi[:, 0] + np.log(
                np.sum(np.exp(term_log - hi), axis=1)
            )
    return main, rlog


@njit(cache=True, parallel=True)
def _ym_ring_scan_jit(y, x, counts, log_r):  # pragma: no cover - jit
    m_count = y.shape[0]
    n_count = x.shape[0]
    main = np.empty(m_count)
    rlog = np.empty(m_count)
    inv_neg_log_r = np.empty(n_count)
    log_c2lr = np.empty(n_count)
    r2 = np.empty(n_count)
    for n in range(n_count):
        inv_neg_log_r[n] = -1.0 / log_r[n]
        log_c2lr[n] = math.log(counts[n]) + 2.0 * log_r[n]
        r2[n] = math.exp(2.0 * log_r[n])
    for m in prange(m_count):
        acc = 0.0
        run_max = -np.inf
        run_sum = 0.0
        for n in range(n_count):
            gap = y[m] - x[n]
            gap2 = gap * gap
            acc += counts[n] * inv_neg_log_r[n] / gap2
            tl = log_c2lr[n] - 2.0 * math.log(gap2 - r2[n])
            if tl > run_max:
                run_sum = run_sum * math.exp(run_max - tl) + 1.0
                run_max = tl
            else:
                run_sum += math.exp(tl - run_max)
        main[m] = acc
        rlog[m] = run_max + math.log(run_sum) if run_sum > 0.0 else -np.inf
    return main, rlog


def _ym_ring_scan_numba(y, x, counts, log_r):
    y = np.ascontiguousarray(y, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    c = np.ascontiguousarray(counts, dtype=np.float64)
    lr = np.ascontiguousarray(log_r, dtype=np.float64)
    block = max(1, (1 << 22) // max(1, x.shape[0]))
    for lo in range(0, y.shape[0], block):
        if np.any((y[lo : lo + block, None] - x[None, :]) == 0):
            raise ValueError("probe radius collides with a ring radius")
    return _ym_ring_scan_jit(y, x, c, lr)


if _HAVE_NUMBA:
    USING_NUMBA = True
    ring_point_sums = _ring_point_sums_numba
    # The grid scan is transcendental-bound: numpy's batched log/exp beat
    # a serial jit loop (measured ~3x on one core), while the prange loop
    # wins once real threads exist.  Pick by the thread pool size.
    from numba import get_num_threads

    if get_num_threads() > 1:
        ym_ring_scan = _ym_ring_scan_numba
    else:
        ym_ring_scan = ym_ring_scan_numpy
else:
    USING_NUMBA = False
    ring_point_sums = ring_point_sums_numpy
    ym_ring_scan = ym_ring_scan_numpy
