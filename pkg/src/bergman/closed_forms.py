"""Closed-form kernels, norms and factors on discs and annuli.

Every formula has a float path and a log-space path; whenever a radius
argument arrives as a LogScalar the log-space path is authoritative and
the result that is itself radius-sized comes back as a LogScalar.
Desk-scale callers can pass plain floats throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .logspace import LogScalar, as_log, log_sub

__all__ = [
    "AnnulusSpec",
    "disc_kernel",
    "exterior_annulus_kernel",
    "monomial_norm_disc",
    "tail_norm_annulus",
    "disc_moment",
    "restriction_factor_disc",
    "restriction_factor_annulus",
    "u_ratio",
    "tail_kernel_bound_order1",
    "tail_kernel_bound_higher",
]

RadiusLike = Union[LogScalar, float, int]

_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class AnnulusSpec:
    """Annulus {inner < |z - center| < outer}; outer may be +inf."""

    center: complex
    inner: LogScalar
    outer: LogScalar

    def __init__(self, center: complex, inner: RadiusLike, outer: RadiusLike):
        object.__setattr__(self, "center", complex(center))
        inn = inner if isinstance(inner, LogScalar) else LogScalar.from_float(float(inner))
        out = (
            outer
            if isinstance(outer, LogScalar)
            else LogScalar.from_log(math.inf)
            if math.isinf(float(outer))
            else LogScalar.from_float(float(outer))
        )
        if not inn.log < out.log:
            raise ValueError("annulus requires inner < outer")
        object.__setattr__(self, "inner", inn)
        object.__setattr__(self, "outer", out)


def disc_kernel(R: float, z: complex) -> float:
    """Bergman kernel of disc(0, R) on the diagonal: R^2/(pi (R^2-|z|^2)^2)."""
    R = float(R)
    if R <= 0:
        raise ValueError("disc radius must be positive")
    a2 = abs(z) ** 2
    if a2 >= R * R:
        raise ValueError("point lies outside the open disc")
    return R * R / (math.pi * (R * R - a2) ** 2)


def exterior_annulus_kernel(z0: complex, r: RadiusLike, z: complex):
    """r^2/(pi (|z-z0|^2 - r^2)^2), the kernel of the exterior annulus.

    This is the diagonal Bergman kernel of {|w - z0| > r} evaluated at z.
    Returns a LogScalar when r is one, a float otherwise.
    """
    lr = as_log(r)
    d2_log = 2.0 * as_log(abs(complex(z) - complex(z0)))
    if d2_log <= 2.0 * lr:
        raise ValueError("point must lie strictly outside the closed r-disc")
    log_val = 2.0 * lr - _LOG_PI - 2.0 * log_sub(d2_log, 2.0 * lr)
    if isinstance(r, LogScalar):
        return LogScalar.from_log(log_val)
    return math.exp(log_val)


def monomial_norm_disc(k: int, R: float) -> float:
    """Squared L2 norm of z^k over disc(0, R): pi R^(2k+2)/(k+1)."""
    if k < 0:
        raise ValueError("monomial degree must be >= 0")
    return math.pi * float(R) ** (2 * k + 2) / (k + 1)


def tail_norm_annulus(m: int, a: AnnulusSpec) -> LogScalar:
    """Squared L2 norm of (z-c)^(-m) over the annulus, as a LogScalar.

    m = 1: 2 pi (log outer - log inner); requires a finite outer radius.
    m >= 2: pi (inner^(2-2m) - outer^(2-2m))/(m-1); outer may be +inf.
    """
    if m < 1:
        raise ValueError("tail order must be >= 1")
    li, lo = a.inner.log, a.outer.log
    if m == 1:
        if math.isinf(lo):
            raise ValueError("order-1 tail norm diverges on an unbounded annulus")
        return LogScalar.from_float(2.0 * math.pi * (lo - li))
    hi = (2 - 2 * m) * li
    lo_term = -math.inf if math.isinf(lo) else (2 - 2 * m) * lo
    return LogScalar.from_log(_LOG_PI - math.log(m - 1) + log_sub(hi, lo_term))


def disc_moment(a: complex, rho: float, k: int, l: int) -> complex:
    """Moment integral of z^k conj(z)^l over disc(a, rho).

    Equals pi * sum_m C(k,m) C(l,m) a^(k-m) conj(a)^(l-m) rho^(2m+2)/(m+1),
    the exact value obtained by expanding around the center.
    """
    if k < 0 or l < 0:
        raise ValueError("moment exponents must be >= 0")
    a = complex(a)
    total = 0j
    for m in range(min(k, l) + 1):
        total += (
            math.comb(k, m)
            * math.comb(l, m)
            * a ** (k - m)
            * a.conjugate() ** (l - m)
            * float(rho) ** (2 * m + 2)
            / (m + 1)
        )
    return math.pi * total


def restriction_factor_disc(r: RadiusLike, R: RadiusLike):
    """Norm contraction r^2/R^2 of a disc-vanishing function, disc case.

    A holomorphic function vanishing at the center of disc(z0, R) has
    squared norm over disc(z0, r) at most this factor times its squared
    norm over disc(z0, R).
    """
    lr, lR = as_log(r), as_log(R)
    if lr > lR:
        raise ValueError("requires r <= R")
    log_val = 2.0 * (lr - lR)
    if isinstance(r, LogScalar) or isinstance(R, LogScalar):
        return LogScalar.from_log(log_val)
    return math.exp(log_val)


def restriction_factor_annulus(r: RadiusLike, s: RadiusLike, t: RadiusLike) -> float:
    """Norm contraction (log t - log s)/(log t - log r), annulus case.

    Bounds the squared-norm fraction of a tail over the sub-annulus
    (s, t) relative to the full annulus (r, t).  Lies in [0, 1].
    """
    lr, ls, lt = as_log(r), as_log(s), as_log(t)
    if not (lr <= ls <= lt):
        raise ValueError("requires r <= s <= t")
    if lr == lt:
        raise ValueError("annulus is degenerate (r == t)")
    return (lt - ls) / (lt - lr)


def u_ratio(x: float, a: RadiusLike, b: RadiusLike) -> float:
    """(log x - log b)/(log x - log a) for radii 0 < a <= b < 1 <= x."""
    la, lb = as_log(a), as_log(b)
    lx = math.log(float(x))
    if not (la <= lb < 0.0):
        raise ValueError("requires 0 < a <= b < 1")
    if lx < 0.0:
        raise ValueError("requires x >= 1")
    return (lx - lb) / (lx - la)


def tail_kernel_bound_order1(zj: complex, rj: RadiusLike, z: complex) -> float:
    """Pointwise kernel bound of the order-1 tail space at hole j.

    Equals 1/(2 pi |z-z_j|^2 (log(1+|z_j|) - log r_j)): the normalized
    square of a/(z-z_j) at z, maximized over a, with the norm taken over
    the annulus (r_j, 1+|z_j|) around z_j.
    """
    lr = as_log(rj)
    d2 = abs(complex(z) - complex(zj)) ** 2
    if d2 <= 0:
        raise ValueError("point coincides with the hole center")
    denom_log = math.log(1.0 + abs(complex(zj))) - lr
    return 1.0 / (2.0 * math.pi * d2 * denom_log)


def tail_kernel_bound_higher(zj: complex, rj: RadiusLike, z: complex, c: float = 1.0):
    """c times the exterior-annulus kernel: bound for the order >= 2 tails."""
    val = exterior_annulus_kernel(zj, rj, z)
    if isinstance(val, LogScalar):
        return val * LogScalar.from_float(float(c))
    return float(c) * val
