"""Shifted-power basis elements and their log-aware evaluation.

The L2 engine works with two families of functions on a circular domain:
monomials z^k and hole tails (z - z_j)^(-m).  Raw tail norms scale like
r^(2-2m) and would destroy the conditioning of any Gram matrix as soon as
a hole is small, so every element is stored pre-divided by its dominant
closed-form norm (log_prescale).  Values are produced as a log-magnitude
plus unit phase so that radii far below the double range stay usable;
exponentials are only taken once factors that cancel have been combined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .closed_forms import AnnulusSpec, tail_norm_annulus
from .domain import CircularDomain, HoleSpec

__all__ = [
    "BasisElement",
    "PointSet",
    "RationalCombination",
    "power_log_eval",
    "monomial_element",
    "tail_element",
    "standard_basis",
]


@dataclass(frozen=True)
class BasisElement:
    """(z - center)^power divided by exp(log_prescale).

    power >= 0 is a monomial-type element (center 0 in practice),
    power <= -1 a hole tail of order -power.  hole_index ties a tail to
    its hole in the owning domain; None for monomials.
    """

    center: complex
    power: int
    log_prescale: float = 0.0
    hole_index: Optional[int] = None

    @property
    def is_tail(self) -> bool:
        return self.power < 0

    @property
    def order(self) -> int:
        if not self.is_tail:
            raise ValueError("order is defined for tails only")
        return -self.power

    def descriptor(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "power": self.power,
            "log_prescale": self.log_prescale,
            "hole_index": self.hole_index,
        }

    @staticmethod
    def from_descriptor(data: dict) -> "BasisElement":
        cre, cim = data["center"]
        return BasisElement(
            complex(float(cre), float(cim)),
            int(data["power"]),
            float(data["log_prescale"]),
            None if data.get("hole_index") is None else int(data["hole_index"]),
        )


class PointSet:
    """Evaluation points, optionally in log-polar form around a frame center.

    Contour nodes on a circle of log-radius -5000 around z_j cannot be
    represented as plain complex numbers; they are carried as
    (frame_center, log_abs, angle) and displacements to other centers are
    formed without ever materializing the unrepresentable offset.
    """

    def __init__(
        self,
        frame_center: complex,
        log_abs: np.ndarray,
        angle: np.ndarray,
        plain: Optional[np.ndarray] = None,
    ):
        self.frame_center = complex(frame_center)
        self.log_abs = np.asarray(log_abs, dtype=np.float64)
        self.angle = np.asarray(angle, dtype=np.float64)
        self._plain = plain
        self._polar_cache: Dict[complex, Tuple[np.ndarray, np.ndarray]] = {}

    @staticmethod
    def from_complex(z: np.ndarray) -> "PointSet":
        z = np.asarray(z, dtype=np.complex128)
        mag = np.abs(z)
        with np.errstate(divide="ignore"):
            log_abs = np.log(mag)
        return PointSet(0j, log_abs, np.angle(z), plain=z)

    @staticmethod
    def from_polar(center: complex, log_abs: np.ndarray, angle: np.ndarray) -> "PointSet":
        return PointSet(center, log_abs, angle)

    def __len__(self) -> int:
        return self.log_abs.shape[0]

    def complex_points(self) -> np.ndarray:
        """Plain complex positions; offsets below the double range underflow."""
        if self._plain is not None:
            return self._plain
        with np.errstate(over="ignore"):
            offs = np.exp(self.log_abs) * np.exp(1j * self.angle)
        return self.frame_center + offs

    def polar_to(self, c: complex) -> Tuple[np.ndarray, np.ndarray]:
        """(log|z - c|, arg(z - c)) for every point z of the set."""
        c = complex(c)
        cached = self._polar_cache.get(c)
        if cached is not None:
            return cached
        if c == self.frame_center:
            result = (self.log_abs, self.angle)
        else:
            delta = self.complex_points() - c
            mag = np.abs(delta)
            if np.any(mag == 0.0):
                raise ValueError("evaluation point coincides with a power center")
            result = (np.log(mag), np.angle(delta))
        self._polar_cache[c] = result
        return result


def power_log_eval(
    element: BasisElement,
    points: PointSet,
    mode: str = "value",
) -> Tuple[np.ndarray, np.ndarray]:
    """Log-magnitude and unit phase of an element (or derivative) at points.

    mode 'value': (z-c)^p / N.  mode 'derivative': p (z-c)^(p-1) / N.
    mode 'antiderivative': (z-c)^(p+1)/((p+1) N), defined for p != -1
    (order-1 tails need the multivalued log and are handled by the
    contour engine directly).
    Returns (logmag, phase) with value = exp(logmag) * phase.
    """
    log_abs, angle = points.polar_to(element.center)
    p = element.power
    if mode == "value":
        expo, factor = p, 1.0
    elif mode == "derivative":
        expo, factor = p - 1, float(p)
    elif mode == "antiderivative":
        if p == -1:
            raise ValueError("order-1 tail has a logarithmic antiderivative")
        expo, factor = p + 1, 1.0 / (p + 1)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    if factor == 0.0:
        n = len(points)
        return np.full(n, -math.inf), np.ones(n, dtype=np.complex128)
    logmag = (expo * log_abs) if expo != 0 else np.zeros_like(log_abs)
    logmag = logmag + (math.log(abs(factor)) - element.log_prescale)
    phase = np.exp(1j * expo * angle) if expo != 0 else np.ones(len(points), dtype=np.complex128)
    if factor < 0:
        phase = -phase
    return logmag, phase


def eval_element(element: BasisElement, points: PointSet, mode: str = "value") -> np.ndarray:
    """Plain complex values (exp applied); underflow to 0 is accepted."""
    logmag, phase = power_log_eval(element, points, mode)
    with np.errstate(over="ignore"):
        return np.exp(logmag) * phase


# ---- prescale choices ----


def monomial_element(k: int) -> BasisElement:
    """z^k scaled by its norm over the unit disc, sqrt(pi/(k+1))."""
    if k < 0:
        raise ValueError("monomial degree must be >= 0")
    log_n2 = math.log(math.pi) - math.log(k + 1)
    return BasisElement(0j, k, 0.5 * log_n2, None)


def tail_element(hole: HoleSpec, order: int, hole_index: Optional[int] = None) -> BasisElement:
    """(z-z_j)^(-order) scaled by its norm over the annulus (r_j, 1+|z_j|)."""
    if order < 1:
        raise ValueError("tail order must be >= 1")
    c = hole.center
    if order == 1:
        log_n2 = math.log(2.0 * math.pi * (math.log(1.0 + abs(c)) - hole.r.log))
    else:
        spec = AnnulusSpec(c, hole.r, 1.0 + abs(c))
        log_n2 = tail_norm_annulus(order, spec).log
    return BasisElement(c, -order, 0.5 * log_n2, hole_index)


def standard_basis(
    d: CircularDomain, max_degree: int, max_tail_order: int
) -> List[BasisElement]:
    """Monomials up to max_degree plus tails up to max_tail_order per hole."""
    elements = [monomial_element(k) for k in range(max_degree + 1)]
    for j, hole in enumerate(d.holes):
        for m in range(1, max_tail_order + 1):
            elements.append(tail_element(hole, m, j))
    return elements


class RationalCombination:
    """A finite combination sum_i coeff_i * element_i.

    Exact representation of test functions: rational functions whose only
    poles sit at hole centers.  Plain (unprescaled) powers are elements
    with log_prescale 0.
    """

    def __init__(self, elements: Sequence[BasisElement], coeffs: Sequence[complex]):
        if len(elements) != len(coeffs):
            raise ValueError("element/coefficient length mismatch")
        self.elements = list(elements)
        self.coeffs = np.asarray(coeffs, dtype=np.complex128)

    @staticmethod
    def from_terms(terms: Sequence[Tuple[complex, int, complex]]) -> "RationalCombination":
        """terms: (center, power, coefficient) triples of plain powers."""
        elements = [BasisElement(c, p, 0.0, None) for c, p, _ in terms]
        return RationalCombination(elements, [t[2] for t in terms])

    def eval_points(self, points: PointSet, mode: str = "value") -> np.ndarray:
        total = np.zeros(len(points), dtype=np.complex128)
        for el, c in zip(self.elements, self.coeffs):
            if c == 0:
                continue
            logmag, phase = power_log_eval(el, points, mode)
            with np.errstate(over="ignore"):
                total += c * np.exp(logmag) * phase
        return total

    def __call__(self, z: np.ndarray) -> np.ndarray:
        scalar = np.isscalar(z) or getattr(z, "shape", None) == ()
        pts = PointSet.from_complex(np.atleast_1d(np.asarray(z, dtype=np.complex128)))
        vals = self.eval_points(pts)
        return vals[0] if scalar else vals

    def scaled(self, factor: complex) -> "RationalCombination":
        return RationalCombination(self.elements, self.coeffs * factor)

    def plus(self, other: "RationalCombination") -> "RationalCombination":
        return RationalCombination(
            self.elements + other.elements,
            np.concatenate([self.coeffs, other.coeffs]),
        )

    def minus(self, other: "RationalCombination") -> "RationalCombination":
        return self.plus(other.scaled(-1.0))

    def compressed(self) -> "RationalCombination":
        """Merge duplicate (center, power, prescale) terms, drop zeros."""
        acc: Dict[Tuple[complex, int, float], complex] = {}
        meta: Dict[Tuple[complex, int, float], BasisElement] = {}
        for el, c in zip(self.elements, self.coeffs):
            key = (el.center, el.power, el.log_prescale)
            acc[key] = acc.get(key, 0j) + c
            meta.setdefault(key, el)
        items = [(meta[k], v) for k, v in acc.items() if v != 0]
        if not items:
            return RationalCombination([], [])
        els, cs = zip(*items)
        return RationalCombination(list(els), list(cs))
