"""Dual quadrature backends for L2 inner products of basis elements.

spectral: the area integral over the domain is converted to oriented
boundary-circle integrals of f * conj(G) (G an antiderivative of g) and
evaluated with trapezoid sums, doubling nodes until stable.  Order-1
tails have the multivalued log as antiderivative; the branch is cut
along the radial ray from the hole center pointing away from the
origin, circles met by the cut are integrated piecewise between the
crossing angles, and the jump of the branch across the cut contributes
pi * prescale(g) * integral of f along the cut, with the sign fixed
once against the quad2d backend and frozen by a regression test.

quad2d: genuine two-dimensional quadrature on a polar cell split of the
domain: a log-radial annulus around every hole (resolving radii as
small as exp(-n**19) in the exponent variable) plus the remaining core
in origin-polar coordinates with exact, angle-dependent radial limits.
Slower, independent of the boundary identity, used as the oracle.

Both backends consume prescaled elements and combine log-magnitudes
before exponentiating, so microscopic holes never overflow or lose
their tail norms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .basis import BasisElement, PointSet, power_log_eval
from .domain import CircularDomain, boundary_circles

__all__ = [
    "spectral_gram",
    "spectral_inner_product",
    "quad2d_inner_product",
    "QuadratureWarning",
    "CUT_JUMP_SIGN",
]

# Sign of the branch-jump correction in the spectral backend, with the
# conventions: all circles parametrized counterclockwise, holes weighted
# by orientation -1, branch angle in [alpha, alpha + 2 pi), cut integral
# taken outward from the hole.  Frozen by a regression test against the
# quad2d backend.
CUT_JUMP_SIGN = +1.0

_NODE_START = 64
_NODE_CAP = 1 << 16


class QuadratureWarning(UserWarning):
    pass


@lru_cache(maxsize=64)
def _gauss(n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _gauss_panels(edges: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on consecutive panels [edges]."""
    x, w = _gauss(order)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
    weights = 0.5 * (b - a) * w[None, :] * np.ones_like(nodes)
    return nodes.ravel(), weights.ravel()


def _safe_scale(matrix: np.ndarray, scale_log: np.ndarray) -> np.ndarray:
    """matrix * exp(scale_log) elementwise without spurious inf."""
    with np.errstate(over="ignore", under="ignore"):
        out = matrix * np.exp(scale_log)
    bad = ~np.isfinite(out)
    if np.any(bad):
        mag = np.abs(matrix)
        with np.errstate(divide="ignore", over="ignore"):
            logv = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), -np.inf)
            phase = np.where(mag > 0, matrix / np.where(mag > 0, mag, 1.0), 0.0)
            out = np.where(bad, phase * np.exp(logv + scale_log), out)
    return out


# ---------------------------------------------------------------------------
# spectral backend
# ---------------------------------------------------------------------------


def _offset_values(
    elements: Sequence[BasisElement], pts: PointSet, mode: str
) -> Tuple[np.ndarray, np.ndarray]:
    """Stacked exp(L - M) * phase rows plus the per-row offsets M."""
    n = len(pts)
    rows = np.zeros((len(elements), n), dtype=np.complex128)
    offsets = np.full(len(elements), -math.inf)
    for i, el in enumerate(elements):
        logmag, phase = power_log_eval(el, pts, mode)
        m = float(np.max(logmag))
        if m == -math.inf:
            continue
        offsets[i] = m
        rows[i] = np.exp(logmag - m) * phase
    return rows, offsets


def _log_antiderivative_values(
    g: BasisElement, pts: PointSet, alpha: float
) -> Tuple[np.ndarray, np.ndarray]:
    """prescaled log(z - c) with branch angle in [alpha, alpha + 2 pi)."""
    log_abs, angle = pts.polar_to(g.center)
    theta_cut = alpha + np.mod(angle - alpha, 2.0 * math.pi)
    vals = (log_abs + 1j * theta_cut) * math.exp(-g.log_prescale)
    mag = np.abs(vals)
    mag_safe = np.where(mag > 0, mag, 1.0)
    with np.errstate(divide="ignore"):
        return np.where(mag > 0, np.log(mag_safe), -math.inf), np.where(
            mag > 0, vals / mag_safe, 1.0
        )


@dataclass(frozen=True)
class _CutRay:
    """The branch cut of an order-1 tail: z(u) = origin + u e^{i alpha}."""

    origin: complex
    alpha: float
    u_start_log: float  # log of the hole radius where the cut enters the domain
    u_exit: float  # where the cut leaves the unit disc
    external: bool = False  # pole outside the closed disc: cut avoids D entirely


_RAY_CANDIDATES = 128


def _make_ray(g: BasisElement, d: CircularDomain) -> _CutRay:
    zb = g.center
    hole = None
    if g.hole_index is not None and g.hole_index < len(d.holes):
        candidate = d.holes[g.hole_index]
        if candidate.center == zb:
            hole = candidate
    if hole is None:
        # The index tag can go stale on sub-domains with holes removed;
        # the center is the authoritative link.
        for h in d.holes:
            if h.center == zb:
                hole = h
                break
    if hole is None:
        if abs(zb) > 1.0:
            # Pole outside the closed disc: branch cut from the pole
            # radially away from the origin never meets the domain, so
            # the antiderivative is single-valued on D and no crossing
            # or jump corrections apply.
            alpha = math.atan2(zb.imag, zb.real)
            return _CutRay(zb, alpha, 0.0, 0.0, external=True)
        raise ValueError("order-1 tail has no matching hole in the domain")
    # Pick the cut direction with the most clearance from every other
    # hole center: paired elements are integrated along the cut, and a
    # center close to it puts a near-singularity on the integration
    # path (centers of different rings can be exactly collinear with
    # the radially-outward default).
    base = math.atan2(zb.imag, zb.real) if zb != 0 else 0.0
    others = [h.center for h in d.holes if h.center != zb]
    best_alpha, best_exit, best_clear = base, 0.0, -1.0
    for k in range(_RAY_CANDIDATES if others else 1):
        alpha = base + 2.0 * math.pi * k / _RAY_CANDIDATES
        e = complex(math.cos(alpha), math.sin(alpha))
        # positive root of |zb + u e|^2 = 1
        b = zb.real * e.real + zb.imag * e.imag
        u_exit = -b + math.sqrt(b * b + (1.0 - abs(zb) ** 2))
        clear = math.inf
        for c in others:
            a_vec = c - zb
            proj = min(max(a_vec.real * e.real + a_vec.imag * e.imag, 0.0), u_exit)
            clear = min(clear, abs(a_vec - proj * e))
        if clear > best_clear:
            best_alpha, best_exit, best_clear = alpha, u_exit, clear
    return _CutRay(zb, best_alpha, hole.r.log, best_exit)


def _ray_circle_crossings(
    ray: _CutRay, center: complex, radius: float
) -> List[Tuple[float, float, float]]:
    """Crossings of the cut with a circle: (u, w, h) per crossing.

    In the ray frame the circle center is at (u_c + i h) e^{i alpha} from
    the ray origin; crossings sit at u = u_c -+ w with w = sqrt(R^2-h^2).
    Only crossings with 0 < u < u_exit count (the cut stops at |z| = 1).
    """
    e = complex(math.cos(ray.alpha), math.sin(ray.alpha))
    a_vec = center - ray.origin
    u_c = a_vec.real * e.real + a_vec.imag * e.imag
    h = a_vec.imag * e.real - a_vec.real * e.imag  # Im(conj(e) * a_vec)
    disc = radius * radius - h * h
    if disc <= 0:
        return []
    w = math.sqrt(disc)
    out = []
    for signed_w in (-w, w):
        u = u_c + signed_w
        if 0.0 < u < ray.u_exit:
            out.append((u, signed_w, h))
    return out


def _crossing_angles(ray: _CutRay, center: complex, radius: float) -> List[float]:
    """Circle-parameter angles where the cut crosses the circle."""
    if ray.external:
        return []
    if center == ray.origin:
        return [ray.alpha]
    if center == 0 and radius == 1.0:
        # the cut exits the unit disc exactly once, at angle of the exit point
        z = ray.origin + ray.u_exit * complex(math.cos(ray.alpha), math.sin(ray.alpha))
        return [math.atan2(z.imag, z.real)]
    angles = []
    e = complex(math.cos(ray.alpha), math.sin(ray.alpha))
    for u, _, _ in _ray_circle_crossings(ray, center, radius):
        z = ray.origin + u * e
        angles.append(math.atan2(z.imag - center.imag, z.real - center.real))
    return angles


def _circle_float_radius(log_radius: float) -> float:
    with np.errstate(under="ignore"):
        return math.exp(log_radius) if log_radius > -745.0 else 0.0


def _start_nodes(elements: Sequence[BasisElement]) -> int:
    deg = max((abs(e.power) for e in elements), default=0)
    # alias safety: the top harmonic of aligned pairs is ~2 deg + 3
    need = 4 * deg + 16
    n = _NODE_START
    while n < need:
        n *= 2
    return n


def _converge_doubling(fn, start: int, rel_tol: float, cap: int, what: str):
    prev = fn(start)
    n = start * 2
    while n <= cap:
        cur = fn(n)
        scale = max(float(np.max(np.abs(cur))), 1e-3)
        if float(np.max(np.abs(cur - prev))) <= rel_tol * scale:
            return cur
        prev = cur
        n *= 2
    warnings.warn(f"{what}: node cap reached before convergence", QuadratureWarning)
    return prev


def spectral_gram(
    elements: Sequence[BasisElement],
    d: CircularDomain,
    rel_tol: float = 1e-11,
    node_cap: int = _NODE_CAP,
) -> Tuple[np.ndarray, float]:
    """Gram matrix of prescaled elements over the domain, spectral route.

    Returns (gram, hermitian_defect): the matrix is symmetrized after
    assembly and the pre-symmetrization defect (max |G - G^H| relative
    to the largest entry) is reported for diagnostics.
    """
    elements = list(elements)
    nb = len(elements)
    if nb == 0:
        return np.zeros((0, 0), dtype=np.complex128), 0.0
    circles = boundary_circles(d)
    pow_cols = [i for i, e in enumerate(elements) if e.power != -1]
    log_cols = [i for i, e in enumerate(elements) if e.power == -1]
    rays = {b: _make_ray(elements[b], d) for b in log_cols}

    gram = np.zeros((nb, nb), dtype=np.complex128)
    start = _start_nodes(elements)

    for circle in circles:
        log_r = circle.radius.log
        orient = float(circle.orientation)

        def trapezoid_pass(n: int, cols: List[int], circle=circle, log_r=log_r, orient=orient):
            theta = np.arange(n) * (2.0 * math.pi / n)
            pts = PointSet.from_polar(circle.center, np.full(n, log_r), theta)
            rows_v, offs_v = _offset_values(elements, pts, "value")
            block = np.zeros((nb, len(cols)), dtype=np.complex128)
            weight = np.exp(1j * theta) * (2.0 * math.pi / n)
            for idx, b in enumerate(cols):
                el = elements[b]
                if el.power != -1:
                    lg, pg = power_log_eval(el, pts, "antiderivative")
                else:
                    lg, pg = _log_antiderivative_values(el, pts, rays[b].alpha)
                mg = float(np.max(lg))
                if mg == -math.inf:
                    continue
                col_vals = np.exp(lg - mg) * pg
                s = rows_v @ (weight * np.conj(col_vals))
                scale_log = offs_v + mg + log_r
                block[:, idx] = _safe_scale(s, scale_log) * (0.5 * orient)
            return block

        if pow_cols:
            piece = _converge_doubling(
                lambda n: trapezoid_pass(n, pow_cols),
                start,
                rel_tol,
                node_cap,
                "spectral contour (power columns)",
            )
            gram[:, pow_cols] += piece

        for b in log_cols:
            ray = rays[b]
            radius_f = _circle_float_radius(log_r)
            crossings = _crossing_angles(ray, circle.center, radius_f if radius_f > 0 else 0.0)
            if circle.center == ray.origin:
                crossings = [ray.alpha]
            if not crossings:
                piece = _converge_doubling(
                    lambda n: trapezoid_pass(n, [b]),
                    start,
                    rel_tol,
                    node_cap,
                    "spectral contour (log column)",
                )
                gram[:, [b]] += piece
                continue

            angles = np.sort(np.asarray(crossings))
            # arcs covering [angles[0], angles[0] + 2 pi], split at crossings
            bounds = np.concatenate([angles, [angles[0] + 2.0 * math.pi]])

            def arc_pass(panels_per_arc: int, b=b, ray=ray, bounds=bounds, circle=circle, log_r=log_r, orient=orient):
                col = np.zeros((nb, 1), dtype=np.complex128)
                for ai in range(len(bounds) - 1):
                    lo, hi = float(bounds[ai]), float(bounds[ai + 1])
                    if hi - lo <= 1e-15:
                        continue
                    edges = np.linspace(lo, hi, panels_per_arc + 1)
                    theta, th_w = _gauss_panels(edges, 16)
                    pts = PointSet.from_polar(circle.center, np.full(theta.size, log_r), theta)
                    rows_v, offs_v = _offset_values(elements, pts, "value")
                    lg, pg = _log_antiderivative_values(elements[b], pts, ray.alpha)
                    mg = float(np.max(lg))
                    if mg == -math.inf:
                        continue
                    col_vals = np.exp(lg - mg) * pg
                    weight = np.exp(1j * theta) * th_w
                    s = rows_v @ (weight * np.conj(col_vals))
                    scale_log = offs_v + mg + log_r
                    col[:, 0] += _safe_scale(s, scale_log) * (0.5 * orient)
                return col

            piece = _converge_doubling(
                arc_pass, 4, rel_tol, 4096, "spectral contour (cut circle)"
            )
            gram[:, [b]] += piece

    # branch-jump corrections along the cut segments
    for b in log_cols:
        ray = rays[b]
        if ray.external:
            continue
        seg = _cut_segment_integrals(elements, ray, d)
        gram[:, b] += (
            CUT_JUMP_SIGN * math.pi * math.exp(-elements[b].log_prescale)
        ) * seg

    defect_scale = max(float(np.max(np.abs(gram))), 1e-300)
    defect = float(np.max(np.abs(gram - gram.conj().T))) / defect_scale
    gram = 0.5 * (gram + gram.conj().T)
    return gram, defect


@dataclass(frozen=True)
class _SegEnd:
    """Endpoint of a cut sub-segment, with exact displacement data."""

    u_log: float  # log distance from the ray origin
    cross_hole: Optional[int] = None  # hole whose circle this endpoint sits on
    delta: complex = 0j  # exact displacement to that hole's center


def _cut_segments(ray: _CutRay, d: CircularDomain) -> List[Tuple[_SegEnd, _SegEnd]]:
    """Sub-segments of the cut inside the domain (hole passages removed)."""
    exclusions: List[Tuple[float, float, int, float, float]] = []
    e = complex(math.cos(ray.alpha), math.sin(ray.alpha))
    for k, hole in enumerate(d.holes):
        if hole.center == ray.origin:
            continue
        rf = _circle_float_radius(hole.r.log)
        if rf == 0.0:
            continue
        cr = _ray_circle_crossings(ray, hole.center, rf)
        if len(cr) == 2:
            (u1, w1, h), (u2, w2, _) = sorted(cr)
            exclusions.append((u1, u2, k, w1, h))
    exclusions.sort()
    segments: List[Tuple[_SegEnd, _SegEnd]] = []
    cur = _SegEnd(ray.u_start_log)
    for u1, u2, k, w1, h in exclusions:
        end = _SegEnd(math.log(u1), k, (w1 - 1j * h) * e)
        segments.append((cur, end))
        cur = _SegEnd(math.log(u2), k, (-w1 - 1j * h) * e)
    segments.append((cur, _SegEnd(math.log(ray.u_exit))))
    return segments


def _endpoint_pointset(ray: _CutRay, end: _SegEnd, d: CircularDomain) -> PointSet:
    pts = PointSet.from_polar(
        ray.origin, np.array([end.u_log]), np.array([ray.alpha])
    )
    if end.cross_hole is not None:
        delta = end.delta
        pts._polar_cache[d.holes[end.cross_hole].center] = (
            np.array([math.log(abs(delta))]),
            np.array([math.atan2(delta.imag, delta.real)]),
        )
    return pts


def _cut_segment_integrals(
    elements: Sequence[BasisElement], ray: _CutRay, d: CircularDomain
) -> np.ndarray:
    """integral of each prescaled element along the cut, via antiderivatives."""
    out = np.zeros(len(elements), dtype=np.complex128)
    for start, end in _cut_segments(ray, d):
        p_start = _endpoint_pointset(ray, start, d)
        p_end = _endpoint_pointset(ray, end, d)
        for i, el in enumerate(elements):
            if el.power != -1:
                ls, ps = power_log_eval(el, p_start, "antiderivative")
                le, pe = power_log_eval(el, p_end, "antiderivative")
                with np.errstate(over="ignore"):
                    out[i] += (np.exp(le) * pe - np.exp(ls) * ps)[0]
            else:
                la_s, an_s = p_start.polar_to(el.center)
                la_e, an_e = p_end.polar_to(el.center)
                dang = an_e[0] - an_s[0]
                # straight segment missing the pole: total turn below pi
                dang = (dang + math.pi) % (2.0 * math.pi) - math.pi
                out[i] += math.exp(-el.log_prescale) * complex(la_e[0] - la_s[0], dang)
    return out


def spectral_inner_product(
    f: BasisElement,
    g: BasisElement,
    d: CircularDomain,
    rel_tol: float = 1e-11,
) -> complex:
    if f is g or f == g:
        gram, _ = spectral_gram([f], d, rel_tol)
        return complex(gram[0, 0])
    gram, _ = spectral_gram([f, g], d, rel_tol)
    return complex(gram[0, 1])


# ---------------------------------------------------------------------------
# quad2d backend
# ---------------------------------------------------------------------------


def _buffer_radii(d: CircularDomain) -> List[float]:
    buffers = []
    for j, h in enumerate(d.holes):
        cand = 1.0 - abs(h.center)
        for k, other in enumerate(d.holes):
            if k != j:
                cand = min(cand, 0.5 * abs(h.center - other.center))
        b = 0.5 * cand
        if not b > h.r_float:
            raise ValueError(
                f"hole {j} too large relative to its clearance for quad2d"
            )
        buffers.append(b)
    return buffers


def _center_power(el: BasisElement, center: complex) -> int:
    return el.power if el.center == center else 0


def _point_value_log(el: BasisElement, z: complex) -> Tuple[float, complex]:
    pts = PointSet.from_complex(np.array([z]))
    logmag, phase = power_log_eval(el, pts, "value")
    return float(logmag[0]), complex(phase[0])


def _annulus_piece(
    f: BasisElement,
    g: BasisElement,
    zj: complex,
    u_lo: float,
    u_hi: float,
    rel_tol: float,
) -> complex:
    """Integral of f conj(g) over the annulus exp(u_lo) < |z-zj| < exp(u_hi)."""
    depth = 40.0
    u_star = max(u_hi - depth, u_lo)

    def upper(round_idx: int) -> complex:
        h = 0.5 / (2 ** round_idx)
        m_phi = 16 * (2 ** round_idx)
        n_panels = max(1, int(math.ceil((u_hi - u_star) / h)))
        edges = np.linspace(u_star, u_hi, n_panels + 1)
        u_nodes, u_w = _gauss_panels(edges, 16)
        phi = np.arange(m_phi) * (2.0 * math.pi / m_phi)
        uu = np.repeat(u_nodes, m_phi)
        ww = np.repeat(u_w, m_phi) * (2.0 * math.pi / m_phi)
        pp = np.tile(phi, u_nodes.size)
        pts = PointSet.from_polar(zj, uu, pp)
        lf, pf = power_log_eval(f, pts, "value")
        lg, pg = power_log_eval(g, pts, "value")
        with np.errstate(over="ignore", under="ignore"):
            vals = np.exp(lf + lg + 2.0 * uu) * pf * np.conj(pg)
        return complex(np.sum(vals * ww))

    val = upper(0)
    for ri in range(1, 5):
        nxt = upper(ri)
        if abs(nxt - val) <= rel_tol * max(abs(nxt), 1e-3):
            val = nxt
            break
        val = nxt

    if u_star > u_lo:
        pf_c = _center_power(f, zj)
        pg_c = _center_power(g, zj)
        if pf_c == pg_c:
            kappa = 2 + pf_c + pg_c
            if f.center == zj:
                lf0, ph_f0 = -f.log_prescale, 1.0 + 0j
            else:
                lf0, ph_f0 = _point_value_log(f, zj)
            if g.center == zj:
                lg0, ph_g0 = -g.log_prescale, 1.0 + 0j
            else:
                lg0, ph_g0 = _point_value_log(g, zj)
            if kappa > 0:
                li = kappa * u_star + math.log1p(-math.exp(kappa * (u_lo - u_star))) - math.log(kappa)
            elif kappa < 0:
                li = kappa * u_lo + math.log1p(-math.exp(kappa * (u_star - u_lo))) - math.log(-kappa)
            else:
                li = math.log(u_star - u_lo)
            with np.errstate(over="ignore"):
                deep = (
                    2.0
                    * math.pi
                    * math.exp(lf0 + lg0 + li)
                    * ph_f0
                    * np.conj(ph_g0)
                )
            val += complex(deep)
    return val


def _graded_edges(a: float, b: float, grade_a: bool, grade_b: bool, h_max: float) -> np.ndarray:
    """Panel edges on [a, b], geometrically refined toward flagged ends."""
    length = b - a
    if length <= 0:
        return np.array([a, b])
    h0 = min(h_max / 8.0, length / 8.0)
    left: List[float] = [a]
    if grade_a:
        step = h0
        pos = a
        while pos + step < a + length / 2 and step < h_max:
            pos += step
            left.append(pos)
            step *= 2.0
    right: List[float] = [b]
    if grade_b:
        step = h0
        pos = b
        while pos - step > a + length / 2 and step < h_max:
            pos -= step
            right.append(pos)
            step *= 2.0
    lo = left[-1]
    hi = right[-1]
    n_mid = max(1, int(math.ceil((hi - lo) / h_max)))
    mid = np.linspace(lo, hi, n_mid + 1)
    edges = np.unique(np.concatenate([np.asarray(left), mid, np.asarray(right)]))
    return edges


def _allowed_intervals(
    rho_lims: List[Tuple[float, float]],
) -> List[Tuple[float, float]]:
    """Complement of a union of disjoint radial exclusions inside [0, 1]."""
    segs = sorted((max(0.0, a), min(1.0, b)) for a, b in rho_lims if b > 0 and a < 1)
    out: List[Tuple[float, float]] = []
    cur = 0.0
    for a, b in segs:
        if a > cur:
            out.append((cur, a))
        cur = max(cur, b)
    if cur < 1.0:
        out.append((cur, 1.0))
    return out


def _core_piece(
    f: BasisElement,
    g: BasisElement,
    d: CircularDomain,
    buffers: Sequence[float],
    rel_tol: float,
) -> complex:
    discs = [(h.center, b) for h, b in zip(d.holes, buffers)]

    # sector breakpoints: tangency angles of every off-center buffer disc
    crits: List[float] = []
    for c, b in discs:
        rho = abs(c)
        if rho > b:
            psi = math.atan2(c.imag, c.real)
            half = math.asin(b / rho)
            crits.extend([psi - half, psi + half])
    crits = sorted({math.remainder(a, 2.0 * math.pi) for a in crits})
    if not crits:
        sectors = [(0.0, 2.0 * math.pi)]
    else:
        sectors = [
            (crits[i], crits[i + 1] if i + 1 < len(crits) else crits[0] + 2.0 * math.pi)
            for i in range(len(crits))
        ]

    def exclusions_at(theta: float) -> List[Tuple[float, float]]:
        out = []
        for c, b in discs:
            rho = abs(c)
            proj = c.real * math.cos(theta) + c.imag * math.sin(theta)
            disc_val = b * b - (rho * rho - proj * proj)
            if disc_val <= 0:
                continue
            w = math.sqrt(disc_val)
            out.append((proj - w, proj + w))
        return out

    min_buffer = min((b for _, b in discs), default=1.0)

    def sector_value(theta_panels: int, radial_h: float, sec: Tuple[float, float]) -> complex:
        a, b = sec
        span = b - a
        # sin^2 substitution: regularizes the sqrt behavior of the
        # interval endpoints at tangency angles on both sector ends
        xi_edges = np.linspace(0.0, 1.0, theta_panels + 1)
        xi, xw = _gauss_panels(xi_edges, 12)
        theta = a + span * np.sin(0.5 * math.pi * xi) ** 2
        tweight = xw * span * math.pi * np.sin(0.5 * math.pi * xi) * np.cos(0.5 * math.pi * xi)
        zs: List[np.ndarray] = []
        ws: List[np.ndarray] = []
        for th, tw in zip(theta, tweight):
            intervals = _allowed_intervals(exclusions_at(float(th)))
            for (r0, r1), (flag0, flag1) in zip(
                intervals,
                [
                    (iv[0] > 0.0, iv[1] < 1.0)
                    for iv in intervals
                ],
            ):
                edges = _graded_edges(r0, r1, flag0, flag1, max(radial_h, min_buffer / 16.0))
                rho, rw = _gauss_panels(edges, 8)
                zs.append(rho * np.exp(1j * float(th)))
                ws.append(rho * rw * tw)
        if not zs:
            return 0j
        z = np.concatenate(zs)
        w = np.concatenate(ws)
        pts = PointSet.from_complex(z)
        lf, pf = power_log_eval(f, pts, "value")
        lg, pg = power_log_eval(g, pts, "value")
        with np.errstate(over="ignore", under="ignore"):
            vals = np.exp(lf + lg) * pf * np.conj(pg)
        return complex(np.sum(vals * w))

    total = 0j
    for sec in sectors:
        span = sec[1] - sec[0]
        panels = max(4, int(math.ceil(span / 0.4)))
        h = 0.125
        val = sector_value(panels, h, sec)
        for _ in range(4):
            nxt = sector_value(panels * 2, h * 0.5, sec)
            if abs(nxt - val) <= rel_tol * max(abs(nxt), 1e-3):
                val = nxt
                break
            panels *= 2
            h *= 0.5
            val = nxt
        total += val
    return total


def quad2d_inner_product(
    f: BasisElement,
    g: BasisElement,
    d: CircularDomain,
    rel_tol: float = 1e-9,
) -> complex:
    """Inner product over the domain by 2-D quadrature on polar cells."""
    buffers = _buffer_radii(d)
    total = 0j
    for j, hole in enumerate(d.holes):
        total += _annulus_piece(
            f, g, hole.center, hole.r.log, math.log(buffers[j]), rel_tol
        )
    total += _core_piece(f, g, d, buffers, rel_tol)
    return total
