"""Circular multiply connected domains: the unit disc minus closed round holes.

A domain here is E = {|z| < 1} minus finitely many closed discs
cl(disc(z_j, r_j)), optionally punctured at the origin.  Each hole carries
two envelope radii s_j < t_j besides its true radius r_j; the t-discs must
stay pairwise disjoint inside E, and the triple (r, s, t) enters a set of
four per-hole smallness conditions that the kernel estimates downstream
rely on.  Radii are carried in log-space (see logspace.LogScalar) because
the constructions of interest use radii as small as exp(-n**19).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

from .logspace import LogScalar, as_log

__all__ = [
    "HoleSpec",
    "CircularDomain",
    "Circle",
    "ValidationReport",
    "hole_condition_terms",
    "hole_conditions_hold",
    "validate_configuration",
    "contains",
    "boundary_circles",
    "domain_to_dict",
    "domain_from_dict",
    "save_domain",
    "load_domain",
]

# Threshold from the envelope-radius smallness condition: t < exp(-4).
_LOG_T_MAX = -4.0

RadiusLike = Union[LogScalar, float, int]


def _radius(value: RadiusLike) -> LogScalar:
    if isinstance(value, LogScalar):
        return value
    return LogScalar.from_float(float(value))


@dataclass(frozen=True)
class HoleSpec:
    """One round hole: center plus radii r < s < t (log-space)."""

    center: complex
    r: LogScalar
    s: LogScalar
    t: LogScalar

    def __init__(self, center: complex, r: RadiusLike, s: RadiusLike, t: RadiusLike):
        object.__setattr__(self, "center", complex(center))
        object.__setattr__(self, "r", _radius(r))
        object.__setattr__(self, "s", _radius(s))
        object.__setattr__(self, "t", _radius(t))
        for name in ("r", "s", "t"):
            if getattr(self, name).is_zero:
                raise ValueError(
                    f"hole radius {name} must be positive; a float that "
                    "underflows to 0 silently loses the hole -- pass exact "
                    "radii as LogScalar"
                )
        if not (self.r < self.s and self.r < self.t):
            raise ValueError("hole radius r must be strictly smaller than s and t")

    @property
    def r_float(self) -> float:
        return float(self.r)

    @property
    def t_float(self) -> float:
        return float(self.t)


@dataclass(frozen=True)
class CircularDomain:
    """Unit disc minus the closed r-discs of `holes`, minus 0 if punctured."""

    holes: Tuple[HoleSpec, ...] = ()
    punctured: bool = False

    def __init__(self, holes: Sequence[HoleSpec] = (), punctured: bool = False):
        object.__setattr__(self, "holes", tuple(holes))
        object.__setattr__(self, "punctured", bool(punctured))

    @property
    def n_holes(self) -> int:
        return len(self.holes)

    def without_holes(self, drop: Sequence[int]) -> "CircularDomain":
        """Copy of the domain with the listed hole indices removed."""
        dropset = set(drop)
        kept = [h for i, h in enumerate(self.holes) if i not in dropset]
        return CircularDomain(kept, self.punctured)


class Circle(NamedTuple):
    center: complex
    radius: LogScalar
    orientation: int  # +1 outer boundary (CCW), -1 hole boundary (CW)


@dataclass
class ValidationReport:
    ok: bool
    violations: List[str] = field(default_factory=list)
    # Smallest hole index i such that every hole j >= i passes the four
    # smallness conditions; None when the domain has no holes.
    min_condition1_index: Optional[int] = None
    condition1_ok: List[bool] = field(default_factory=list)


def hole_condition_terms(h: HoleSpec) -> dict:
    """The four smallness-condition quantities for one hole, as floats.

    Returns a dict with keys 'log_t', 'r2_over_z2', 'sum3', 'sum4' where
    the conditions are log_t < -4, r^2 < |z|^2/2,
    sum3 = r^2/t^2 + s/t + sqrt(2 log s/log r) < 1 and
    sum4 = 2 log t/log r + sqrt(2 log s/log r) + s/t < 1.
    """
    lr, ls, lt = h.r.log, h.s.log, h.t.log
    if not (lr < ls and lr < lt):
        raise ValueError("hole radius r must be smaller than s and t")
    if lt >= 0 or ls >= 0:
        raise ValueError("hole radii must be < 1")
    # s >= t is allowed here: s/t then exceeds 1 and the conditions fail
    # honestly (that is exactly the state of the early construction rings).
    abs_c = abs(h.center)
    # exp() underflow to 0.0 here is the honest double value of the term.
    r2_t2 = math.exp(2.0 * (lr - lt)) if lr - lt < 0 else math.inf
    s_t = math.exp(ls - lt)
    root = math.sqrt(2.0 * ls / lr)
    t_r = 2.0 * lt / lr
    r2_over_z2 = math.exp(2.0 * lr - 2.0 * math.log(abs_c)) if abs_c > 0 else math.inf
    return {
        "log_t": lt,
        "r2_over_z2": r2_over_z2,
        "sum3": r2_t2 + s_t + root,
        "sum4": t_r + root + s_t,
    }


def hole_conditions_hold(h: HoleSpec) -> bool:
    """Whether one hole passes all four smallness conditions."""
    try:
        terms = hole_condition_terms(h)
    except ValueError:
        return False
    return (
        terms["log_t"] < _LOG_T_MAX
        and terms["r2_over_z2"] < 0.5
        and terms["sum3"] < 1.0
        and terms["sum4"] < 1.0
    )


def validate_configuration(d: CircularDomain) -> ValidationReport:
    """Check the structural invariants and per-hole smallness conditions.

    Structural failures (radius ordering, t-disc overlap, t-disc escaping
    the unit disc, origin inside a closed r-disc) mark the report not ok.
    Smallness-condition failures are reported per hole through
    min_condition1_index / condition1_ok without by themselves making the
    configuration invalid: the constructions only need them from some
    index on.
    """
    report = ValidationReport(ok=True)
    holes = d.holes

    for j, h in enumerate(holes):
        # r is the actual hole boundary and must be the smallest radius;
        # the ordering of s and t is a smallness-condition matter reported
        # through condition1_ok, not a structural one.
        if not (h.r.log < h.s.log and h.r.log < h.t.log):
            report.ok = False
            report.violations.append(f"hole {j}: radius r must be smaller than s and t")
            continue
        if h.s.log >= 0 or h.t.log >= 0:
            report.ok = False
            report.violations.append(f"hole {j}: radii must be < 1")
        # t-disc inside the unit disc, with a relative safety margin.
        t = h.t_float
        if abs(h.center) + t >= 1.0 - 1e-12 * max(1.0, t):
            report.ok = False
            report.violations.append(f"hole {j}: t-disc not contained in the unit disc")
        # Origin must lie outside the closed r-disc.
        if as_log(abs(h.center)) <= h.r.log:
            report.ok = False
            report.violations.append(f"hole {j}: origin inside the closed r-disc")

    # Pairwise disjointness of the t-discs.
    for j in range(len(holes)):
        for k in range(j + 1, len(holes)):
            gap = abs(holes[j].center - holes[k].center)
            tsum = holes[j].t_float + holes[k].t_float
            if gap <= tsum * (1.0 + 1e-12):
                report.ok = False
                report.violations.append(f"holes {j},{k}: t-discs overlap")

    report.condition1_ok = [hole_conditions_hold(h) for h in holes]
    if holes:
        idx = len(holes)
        while idx > 0 and report.condition1_ok[idx - 1]:
            idx -= 1
        report.min_condition1_index = idx
    return report


def contains(d: CircularDomain, z: complex) -> bool:
    """Strict membership of z in the open domain."""
    z = complex(z)
    if abs(z) >= 1.0:
        return False
    if d.punctured and z == 0:
        return False
    for h in d.holes:
        if as_log(abs(z - h.center)) <= h.r.log:
            return False
    return True


def boundary_circles(d: CircularDomain) -> List[Circle]:
    """Oriented boundary: outer unit circle CCW, hole r-circles CW."""
    circles = [Circle(0j, LogScalar.one(), +1)]
    circles.extend(Circle(h.center, h.r, -1) for h in d.holes)
    return circles


# ---- JSON serialization (strict schema) ----


def _require_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown keys in {where}: {sorted(unknown)}")


def domain_to_dict(d: CircularDomain) -> dict:
    return {
        "holes": [
            {
                "center": [h.center.real, h.center.imag],
                "log_r": h.r.log,
                "log_s": h.s.log,
                "log_t": h.t.log,
            }
            for h in d.holes
        ],
        "punctured": d.punctured,
    }


def domain_from_dict(data: dict) -> CircularDomain:
    if not isinstance(data, dict):
        raise ValueError("domain document must be a JSON object")
    _require_keys(data, {"holes", "punctured"}, "domain")
    holes_raw = data.get("holes", [])
    if not isinstance(holes_raw, list):
        raise ValueError("'holes' must be a list")
    holes = []
    for i, raw in enumerate(holes_raw):
        if not isinstance(raw, dict):
            raise ValueError(f"hole {i} must be a JSON object")
        _require_keys(raw, {"center", "log_r", "log_s", "log_t"}, f"hole {i}")
        for key in ("center", "log_r", "log_s", "log_t"):
            if key not in raw:
                raise ValueError(f"hole {i}: missing key {key!r}")
        cre, cim = raw["center"]
        holes.append(
            HoleSpec(
                complex(float(cre), float(cim)),
                LogScalar.from_log(float(raw["log_r"])),
                LogScalar.from_log(float(raw["log_s"])),
                LogScalar.from_log(float(raw["log_t"])),
            )
        )
    return CircularDomain(holes, punctured=bool(data.get("punctured", False)))


def save_domain(d: CircularDomain, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(domain_to_dict(d), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_domain(path: str) -> CircularDomain:
    with open(path, "r", encoding="utf-8") as fh:
        return domain_from_dict(json.load(fh))
