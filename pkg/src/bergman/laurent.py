"""Hole-wise singular decomposition and the restriction-inequality suite.

A function on a circular domain splits as a regular part plus one pure
tail per hole (the negative-power piece of its expansion around that
hole).  For functions represented as rational combinations the split is
exact coefficient bookkeeping; for black-box callables the coefficients
come from uniform circle sampling and an FFT.

On top of the split sits a numeric verification suite for the chain of
norm inequalities that controls the peeling process: restricting the
regular part to the domain with one more hole removed, restricting a
tail between concentric annuli, the cross-term bound, their
combination, and the resulting uniform energy inequality

    ||F||^2_D >= epsilon * (||F_0||^2 + sum_j ||F_j||^2_P)

with an explicit epsilon.  Tail norms over the reference annuli
P(z_j, r_j, 1+|z_j|) are exact diagonal sums, so the reported slacks
carry only the quadrature error of the domain norms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .basis import BasisElement, PointSet, RationalCombination
from .closed_forms import AnnulusSpec, tail_norm_annulus
from .domain import CircularDomain, HoleSpec, contains, validate_configuration
from .hilbert import gram_matrix
from .quadrature import QuadratureWarning

__all__ = [
    "SplitResult",
    "InequalityStep",
    "SuiteReport",
    "ApproximationResult",
    "laurent_coefficients",
    "split",
    "inequality_suite",
    "partial_sum_approximation",
    "annulus_tail_norm_sq",
    "tail_norm_bound",
    "hole_alpha_beta",
]

FunctionLike = Union[RationalCombination, Callable[[np.ndarray], np.ndarray]]


# ---------------------------------------------------------------------------
# coefficient extraction by circle sampling
# ---------------------------------------------------------------------------


def laurent_coefficients(
    F: FunctionLike,
    hole: HoleSpec,
    m_max: int,
    radius_log: Optional[float] = None,
    rel_tol: float = 1e-13,
    length_cap: int = 1 << 14,
) -> np.ndarray:
    """Coefficients a_{-1}..a_{-m_max} of F around the hole center.

    a_{-m} is the contour moment (1/2 pi i) * integral of F(z)(z-z_j)^{m-1},
    evaluated by uniform sampling on a circle and an FFT.  The sampling
    radius defaults to the log-midpoint of r and t, floored at t/8 so the
    samples stay representable when r is microscopic; content invisible
    at floating-point scale on that circle comes back as an honest zero.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    lr, lt = hole.r.log, hole.t.log
    if radius_log is None:
        radius_log = max(0.5 * (lr + lt), lt - math.log(8.0))
    if not lr < radius_log < lt:
        raise ValueError("sampling radius outside the hole annulus")

    def sample(length: int) -> np.ndarray:
        theta = np.arange(length) * (2.0 * math.pi / length)
        pts = PointSet.from_polar(hole.center, np.full(length, radius_log), theta)
        if isinstance(F, RationalCombination):
            return F.eval_points(pts)
        return np.asarray(F(pts.complex_points()), dtype=np.complex128)

    m = np.arange(1, m_max + 1)
    length = 128
    prev: Optional[np.ndarray] = None
    coeffs = np.zeros(m_max, dtype=np.complex128)
    sample_scale = 1.0
    while True:
        vals = sample(length)
        sample_scale = float(np.max(np.abs(vals))) if vals.size else 0.0
        fhat = np.fft.fft(vals)
        with np.errstate(under="ignore"):
            coeffs = fhat[(length - m) % length] / length * np.exp(m * radius_log)
        spectrum_ok = bool(
            np.abs(fhat[length // 2]) <= 1e-13 * max(float(np.max(np.abs(fhat))), 1e-300)
        )
        stable = prev is not None and float(
            np.max(np.abs(coeffs - prev))
        ) <= rel_tol * max(1.0, float(np.max(np.abs(coeffs))))
        if (spectrum_ok and stable) or length >= length_cap:
            if length >= length_cap and not (spectrum_ok and stable):
                warnings.warn(
                    "laurent sampling length cap reached before spectral decay",
                    QuadratureWarning,
                )
            break
        prev = coeffs
        length *= 2

    with np.errstate(over="ignore"):
        trailing = abs(coeffs[-1]) * math.exp(-m_max * radius_log)
    if trailing > 1e-10 * max(1.0, sample_scale):
        warnings.warn(
            "laurent tail not decaying at the sampling circle: "
            f"order {m_max} still contributes {trailing:.3e}",
            QuadratureWarning,
        )
    return coeffs


# ---------------------------------------------------------------------------
# exact algebraic split
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitResult:
    """F = remainder + sum(parts): one pure tail per peeled hole."""

    parts: Tuple[RationalCombination, ...]
    remainder: RationalCombination
    residual: float


def _probe_points(d: CircularDomain, count: int) -> PointSet:
    """Deterministic interior probes away from every hole."""
    out: List[complex] = []
    k = 0
    golden = 2.399963229728653
    while len(out) < count and k < 40 * count:
        rho = 0.15 + 0.8 * math.sqrt((k % (4 * count)) / (4.0 * count))
        z = rho * complex(math.cos(golden * k), math.sin(golden * k))
        k += 1
        if not contains(d, z):
            continue
        ok = True
        for h in d.holes:
            clearance = max(2.0 * h.t_float, 0.02)
            if abs(z - h.center) < clearance:
                ok = False
                break
        if ok:
            out.append(z)
    if len(out) < count:
        raise ValueError("could not place probe points inside the domain")
    return PointSet.from_complex(np.asarray(out, dtype=np.complex128))


def split(
    F: RationalCombination,
    d: CircularDomain,
    upto: Optional[int] = None,
    probe_count: int = 50,
) -> SplitResult:
    """Peel the singular parts of F at the first `upto` holes.

    Exact coefficient bookkeeping: the tail at a hole is the subsum of
    F's negative-power terms centered there, so re-running with a larger
    `upto` leaves earlier parts unchanged identically.  The residual is
    the max reconstruction error over interior probe points, relative to
    max(1, scale of F).
    """
    comb = F.compressed()
    holes = d.holes
    n = len(holes) if upto is None else int(upto)
    if not 0 <= n <= len(holes):
        raise ValueError("upto out of range")
    center_index = {h.center: j for j, h in enumerate(holes)}
    part_items: List[List[Tuple[BasisElement, complex]]] = [[] for _ in range(n)]
    rem_items: List[Tuple[BasisElement, complex]] = []
    for el, c in zip(comb.elements, comb.coeffs):
        if el.power <= -1:
            j = center_index.get(el.center)
            if j is None:
                # A pole outside the closed unit disc leaves F holomorphic
                # on the domain; it stays in the remainder.
                if abs(el.center) < 1.0:
                    raise ValueError(
                        f"singular term centered at {el.center} matches no hole"
                    )
            elif j < n:
                part_items[j].append((el, c))
                continue
        rem_items.append((el, c))

    def build(items: List[Tuple[BasisElement, complex]]) -> RationalCombination:
        if not items:
            return RationalCombination([], [])
        els, cs = zip(*items)
        return RationalCombination(list(els), list(cs))

    parts = tuple(build(items) for items in part_items)
    remainder = build(rem_items)

    pts = _probe_points(d, probe_count)
    recon = remainder.eval_points(pts)
    for p in parts:
        recon = recon + p.eval_points(pts)
    ref = comb.eval_points(pts)
    scale = max(1.0, float(np.max(np.abs(ref))))
    residual = float(np.max(np.abs(ref - recon))) / scale
    return SplitResult(parts, remainder, residual)


# ---------------------------------------------------------------------------
# exact annulus norms and per-hole factors
# ---------------------------------------------------------------------------


def annulus_tail_norm_sq(part: RationalCombination, hole: HoleSpec) -> float:
    """||part||^2 over P(z_j, r_j, 1+|z_j|), exact (powers are orthogonal)."""
    total = 0.0
    spec_outer = 1.0 + abs(hole.center)
    for el, c in zip(part.elements, part.coeffs):
        if c == 0:
            continue
        if el.power > -1 or el.center != hole.center:
            raise ValueError("part contains a non-tail term for this hole")
        m = -el.power
        log_norm2 = tail_norm_annulus(m, AnnulusSpec(hole.center, hole.r, spec_outer)).log
        with np.errstate(over="ignore"):
            total += abs(c) ** 2 * math.exp(log_norm2 - 2.0 * el.log_prescale)
    return total


def hole_alpha_beta(hole: HoleSpec) -> Tuple[float, float]:
    """The two per-hole peeling factors.

    alpha multiplies the regular part's norm: 1 - r^2/t^2 - s/t
    - sqrt(2 log s / log r).  beta multiplies the tail's annulus norm:
    1 - 2 log t/log r - s/t - sqrt(2 log s/log r).
    """
    lr, ls, lt = hole.r.log, hole.s.log, hole.t.log
    with np.errstate(under="ignore"):
        r2_t2 = math.exp(2.0 * (lr - lt)) if 2.0 * (lr - lt) > -745.0 else 0.0
        s_t = math.exp(ls - lt) if ls - lt > -745.0 else 0.0
    root = math.sqrt(2.0 * ls / lr)
    alpha = 1.0 - r2_t2 - s_t - root
    beta = 1.0 - 2.0 * lt / lr - s_t - root
    return alpha, beta


def _tail_factor(hole: HoleSpec) -> float:
    lr, ls, lt = hole.r.log, hole.s.log, hole.t.log
    with np.errstate(under="ignore"):
        s_t = math.exp(ls - lt) if ls - lt > -745.0 else 0.0
    return 1.0 + s_t + math.sqrt(2.0 * ls / lr)


def tail_norm_bound(
    d: CircularDomain, p_norms: Sequence[float], k: int, l: int
) -> float:
    """Bound for ||F_k + ... + F_l||^2 on the domain with holes k.. filled in.

    sum_{j=k}^{l} ||F_j||^2_P * prod_{m=k}^{min(l-1, j)} (1 + s_m/t_m
    + sqrt(2 log s_m / log r_m)), 1-based hole indices; an empty product
    (j = l = k) is 1.
    """
    if not 1 <= k <= l <= len(d.holes):
        raise ValueError("invalid index range")
    total = 0.0
    for j in range(k, l + 1):
        prod = 1.0
        for m in range(k, min(l - 1, j) + 1):
            prod *= _tail_factor(d.holes[m - 1])
        total += p_norms[j - 1] * prod
    return total


# ---------------------------------------------------------------------------
# inequality suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityStep:
    """Slack record for peeling one hole (1-based index).

    All slacks are lhs - rhs of an inequality that must be nonnegative:
      slack_disc_restriction:  ||f||^2_{D_N} - (1 - r^2/t^2) ||f||^2_{D_{N+1}}
      slack_tail_restriction:  ||g||^2_{D_N} - (1 - 2 log t/log r) ||g||^2_P
      slack_cross_term:        (s/t + sqrt(2 log s/log r))/2 * (||f||^2_{D_{N+1}}
                               + ||g||^2_P) - |<f, g>_{D_N}|
      slack_combined:          ||f+g||^2_{D_N} - alpha ||f||^2_{D_{N+1}}
                               - beta ||g||^2_P
    """

    hole: int
    alpha: float
    beta: float
    norm_f_next: float
    norm_f_cur: float
    norm_g_cur: float
    norm_g_annulus: float
    inner_fg: complex
    norm_total_cur: float
    slack_disc_restriction: float
    slack_tail_restriction: float
    slack_cross_term: float
    slack_combined: float
    parseval_gap: float


@dataclass(frozen=True)
class SuiteReport:
    steps: Tuple[InequalityStep, ...]
    epsilon: float
    product_lower_bound: float
    beta_infimum: float
    norm_total: float
    part_norms_annulus: Tuple[float, ...]
    remainder_norm_disc: float
    slack_energy: Tuple[float, ...]  # per peel depth N = 1..H
    slack_energy_limit: float  # depth H with the remainder measured on E
    min_slack: float
    ok: bool


class _NormEngine:
    """Quadratic-form norms over cached per-domain Gram matrices."""

    def __init__(self, backend: str):
        self.backend = backend
        self._cache: Dict[Tuple[CircularDomain, Tuple[BasisElement, ...]], np.ndarray] = {}

    def gram(
        self, d: CircularDomain, elements: Tuple[BasisElement, ...]
    ) -> np.ndarray:
        key = (d, elements)
        if key not in self._cache:
            build = gram_matrix(elements, d, backend=self.backend)
            self._cache[key] = build.gram
        return self._cache[key]

    def _vec(
        self, comb: RationalCombination, index: Dict[BasisElement, int], n: int
    ) -> np.ndarray:
        v = np.zeros(n, dtype=np.complex128)
        for el, c in zip(comb.elements, comb.coeffs):
            v[index[el]] += c
        return v

    def pairing(
        self,
        f: RationalCombination,
        g: RationalCombination,
        d: CircularDomain,
    ) -> complex:
        universe = tuple(
            sorted(
                {el for el in f.elements} | {el for el in g.elements},
                key=lambda e: (e.center.real, e.center.imag, e.power, e.log_prescale),
            )
        )
        if not universe:
            return 0j
        index = {el: i for i, el in enumerate(universe)}
        gram = self.gram(d, universe)
        vf = self._vec(f, index, len(universe))
        vg = self._vec(g, index, len(universe))
        return complex(vf @ gram @ np.conj(vg))

    def norm_sq(self, f: RationalCombination, d: CircularDomain) -> float:
        return float(np.real(self.pairing(f, f, d)))


def inequality_suite(
    F: RationalCombination,
    d: CircularDomain,
    backend: str = "spectral",
    slack_tol: float = 1e-9,
) -> SuiteReport:
    """Verify the peeling inequality chain for F on d, reporting slacks.

    Requires every hole to satisfy the four smallness conditions (the
    validator's per-hole checks); peels holes in their listed order.
    The epsilon in the energy inequality is the product of the alpha
    factors times min(1, inf beta) - a valid lower bound for every
    partial factor beta_k * prod_{j<k} alpha_j.
    """
    report = validate_configuration(d)
    if not report.ok:
        raise ValueError("domain fails structural validation: " + "; ".join(report.violations))
    if report.min_condition1_index != 0:
        raise ValueError(
            "inequality suite requires the smallness conditions at every hole "
            f"(first all-pass index is {report.min_condition1_index})"
        )
    holes = d.holes
    h_count = len(holes)
    engine = _NormEngine(backend)

    full_split = split(F, d)
    parts = full_split.parts
    remainder = full_split.remainder
    p_norms = tuple(annulus_tail_norm_sq(parts[j], holes[j]) for j in range(h_count))

    alphas, betas = zip(*(hole_alpha_beta(h) for h in holes)) if h_count else ((), ())
    product_lower = math.exp(sum(math.log(a) for a in alphas)) if h_count else 1.0
    beta_inf = min(betas) if h_count else 1.0
    epsilon = product_lower * min(1.0, beta_inf)

    def peeled(n: int) -> RationalCombination:
        """F with the first n tails removed: the regular part at depth n."""
        comb = remainder
        for j in range(n, h_count):
            comb = comb.plus(parts[j])
        return comb.compressed()

    def domain_at(n: int) -> CircularDomain:
        """D_{n}: holes with 1-based index >= n (0-based >= n-1) kept."""
        return d.without_holes(range(n - 1))

    norm_total = engine.norm_sq(F.compressed(), domain_at(1))

    steps: List[InequalityStep] = []
    slacks_all: List[float] = []
    for n in range(1, h_count + 1):
        hole = holes[n - 1]
        lr, ls, lt = hole.r.log, hole.s.log, hole.t.log
        f = peeled(n)
        g = parts[n - 1]
        d_cur = domain_at(n)
        d_next = domain_at(n + 1)
        nf_next = engine.norm_sq(f, d_next)
        nf_cur = engine.norm_sq(f, d_cur)
        ng_cur = engine.norm_sq(g, d_cur)
        ng_p = p_norms[n - 1]
        ip = engine.pairing(f, g, d_cur) if len(g.elements) else 0j
        n_total_cur = engine.norm_sq(peeled(n - 1), d_cur)

        with np.errstate(under="ignore"):
            r2_t2 = math.exp(2.0 * (lr - lt)) if 2.0 * (lr - lt) > -745.0 else 0.0
            s_t = math.exp(ls - lt) if ls - lt > -745.0 else 0.0
        root = math.sqrt(2.0 * ls / lr)
        alpha, beta = alphas[n - 1], betas[n - 1]

        s5 = nf_cur - (1.0 - r2_t2) * nf_next
        s6 = ng_cur - (1.0 - 2.0 * lt / lr) * ng_p
        s7 = 0.5 * (s_t + root) * (nf_next + ng_p) - abs(ip)
        s8 = n_total_cur - alpha * nf_next - beta * ng_p
        parseval = abs(n_total_cur - (nf_cur + ng_cur + 2.0 * np.real(ip)))
        steps.append(
            InequalityStep(
                hole=n,
                alpha=alpha,
                beta=beta,
                norm_f_next=nf_next,
                norm_f_cur=nf_cur,
                norm_g_cur=ng_cur,
                norm_g_annulus=ng_p,
                inner_fg=ip,
                norm_total_cur=n_total_cur,
                slack_disc_restriction=s5,
                slack_tail_restriction=s6,
                slack_cross_term=s7,
                slack_combined=s8,
                parseval_gap=parseval,
            )
        )
        slacks_all.extend([s5, s6, s7, s8])

    slack_energy: List[float] = []
    for n in range(1, h_count + 1):
        rhs = epsilon * (
            engine.norm_sq(peeled(n), domain_at(n + 1)) + sum(p_norms[:n])
        )
        slack_energy.append(norm_total - rhs)
    remainder_norm = engine.norm_sq(remainder, CircularDomain(holes=()))
    slack_limit = norm_total - epsilon * (remainder_norm + sum(p_norms))
    slacks_all.extend(slack_energy)
    slacks_all.append(slack_limit)

    min_slack = min(slacks_all) if slacks_all else 0.0
    ok = min_slack >= -slack_tol * max(1.0, norm_total)
    return SuiteReport(
        steps=tuple(steps),
        epsilon=epsilon,
        product_lower_bound=product_lower,
        beta_infimum=beta_inf,
        norm_total=norm_total,
        part_norms_annulus=p_norms,
        remainder_norm_disc=remainder_norm,
        slack_energy=tuple(slack_energy),
        slack_energy_limit=slack_limit,
        min_slack=min_slack,
        ok=ok,
    )


# ---------------------------------------------------------------------------
# partial-sum approximation with the certified tail bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApproximationResult:
    partial_sum: RationalCombination  # remainder + first `upto` tails
    measured_gap_sq: float  # ||F - partial_sum||^2 on the full domain
    tail_bound: float


def partial_sum_approximation(
    F: RationalCombination,
    d: CircularDomain,
    upto: int,
    backend: str = "spectral",
) -> ApproximationResult:
    """Approximate F by its regular part plus the first `upto` tails.

    The measured squared gap on the full domain is certified against the
    telescoped cross-term bound: the gap equals the sum of the remaining
    tails, whose norm is controlled hole by hole with factors
    (1 + s/t + sqrt(2 log s/log r)).
    """
    h_count = len(d.holes)
    if not 0 <= upto <= h_count:
        raise ValueError("upto out of range")
    sr = split(F, d)
    partial = sr.remainder
    for j in range(upto):
        partial = partial.plus(sr.parts[j])
    partial = partial.compressed()

    gap = RationalCombination([], [])
    for j in range(upto, h_count):
        gap = gap.plus(sr.parts[j])
    gap = gap.compressed()

    engine = _NormEngine(backend)
    measured = engine.norm_sq(gap, d) if gap.elements else 0.0
    if upto < h_count:
        p_norms = [annulus_tail_norm_sq(sr.parts[j], d.holes[j]) for j in range(h_count)]
        bound = tail_norm_bound(d, p_norms, upto + 1, h_count)
    else:
        bound = 0.0
    return ApproximationResult(partial, measured, bound)
