"""Metric, path lengths, and distance upper bounds from a kernel evaluator.

The metric here is the square root of the kernel's log-Hessian; path
lengths integrate it along polylines with adaptive panel halving.  The
distance between two points is bounded from above by the shortest path
on a graded polar mesh graph whose edge weights are true segment
lengths.  Everything is an upper bound for the intrinsic distance of
the truncated evaluator: no lower-bound claim is made (a truncated
basis underestimates the kernel, so its metric carries no one-sided
guarantee for the full domain, and outputs should be read as the basis
metric).

The completeness probe walks an approach path toward the origin of a
ring construction, detects every crossing of the ring circles |z| = x_n
and the midpoint circles |z| = y_n, and records at each crossing the
certified single-tail kernel lower bound, the basis metric, and the
cumulative length - the numeric shadow of the boundary-approach
argument: crossing kernel bounds grow ring over ring while midpoint
crossings stay below the kernel majorant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .construction import Construction, majorant
from .domain import CircularDomain, contains
from .hilbert import KernelEvaluator, kernel_lower_bound_single
from .quadrature import QuadratureWarning, _gauss

__all__ = [
    "DEGENERATE_KERNEL",
    "Path",
    "DistanceResult",
    "ProbeRow",
    "ProbeReport",
    "metric",
    "path_length",
    "distance_upper",
    "distance_matrix",
    "completeness_probe",
]

DEGENERATE_KERNEL = 1e-300

# Interior samples per segment when validating that a path stays inside
# the domain.
_SEGMENT_SAMPLES = 32


@dataclass(frozen=True)
class Path:
    """Polyline with all vertices (and sampled segments) inside the domain."""

    points: Tuple[complex, ...]

    def __init__(self, points: Sequence[complex]):
        object.__setattr__(self, "points", tuple(complex(p) for p in points))
        if len(self.points) < 1:
            raise ValueError("path needs at least one point")

    @property
    def segments(self) -> Tuple[Tuple[complex, complex], ...]:
        return tuple(zip(self.points[:-1], self.points[1:]))


@dataclass(frozen=True)
class DistanceResult:
    value: float  # upper bound for the intrinsic distance
    path: Path
    refinement_level: int


def _inside_mask(d: CircularDomain, pts: np.ndarray) -> np.ndarray:
    """Vectorized strict membership in the open domain."""
    pts = np.asarray(pts, dtype=np.complex128)
    ok = np.abs(pts) < 1.0
    if d.punctured:
        ok &= pts != 0
    for h in d.holes:
        r = h.r_float
        gap = np.abs(pts - h.center)
        ok &= gap > r if r > 0.0 else gap > 0.0
    return ok


def _validate_path(d: CircularDomain, p: Path) -> None:
    for i, z in enumerate(p.points):
        if not contains(d, z):
            raise ValueError(f"path vertex {i} at {z} is outside the domain")
    for i, (a, b) in enumerate(p.segments):
        if a == b:
            continue
        ts = (np.arange(_SEGMENT_SAMPLES) + 1.0) / (_SEGMENT_SAMPLES + 1.0)
        samples = a + (b - a) * ts
        if not bool(np.all(_inside_mask(d, samples))):
            raise ValueError(f"path segment {i} ({a} -> {b}) leaves the domain")


def metric(ke: KernelEvaluator, z: complex) -> float:
    """sqrt of the kernel log-Hessian at z (the length of a unit vector).

    The Hessian is nonnegative by the Cauchy-Schwarz inequality; rounding
    can push the computed value a hair below zero, which is clamped -
    genuine metric zeros are reported as 0, never asserted absent.
    """
    k, hess = ke.kernel_and_hessian(np.array([z]))
    if k[0] <= DEGENERATE_KERNEL:
        raise ValueError(f"kernel degenerate at {z}: K = {k[0]:.3e}")
    return math.sqrt(max(float(hess[0]), 0.0))


def _metric_at(ke: KernelEvaluator, pts: np.ndarray) -> np.ndarray:
    k, hess = ke.kernel_and_hessian(pts)
    if np.any(k <= DEGENERATE_KERNEL):
        bad = np.asarray(pts).ravel()[int(np.argmin(k))]
        raise ValueError(f"kernel degenerate along path at {bad}")
    return np.sqrt(np.maximum(hess, 0.0))


def _segment_length(
    ke: KernelEvaluator, a: complex, b: complex, rel_tol: float, panel_cap: int = 1024
) -> float:
    """Adaptive composite Gauss quadrature of the metric along [a, b]."""
    if a == b:
        return 0.0
    span = abs(b - a)
    xs, ws = _gauss(8)
    panels = 1
    prev = math.inf
    while True:
        edges = np.linspace(0.0, 1.0, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
        half = 0.5 * (edges[1] - edges[0])
        ts = (mid + half * xs[None, :]).ravel()
        beta = _metric_at(ke, a + (b - a) * ts)
        value = span * half * float(np.sum(beta.reshape(panels, -1) @ ws))
        if math.isfinite(prev) and abs(value - prev) <= rel_tol * max(abs(value), 1e-300):
            return value
        if panels >= panel_cap:
            warnings.warn(
                f"path-length quadrature hit the panel cap on {a} -> {b}",
                QuadratureWarning,
            )
            return value
        prev = value
        panels *= 2


def path_length(ke: KernelEvaluator, p: Path, rel_tol: float = 1e-6) -> float:
    """Length of the polyline in the evaluator's metric.

    Each segment is integrated with composite Gauss panels, halving the
    panel width until the relative change drops below rel_tol.  Raises
    if any vertex or sampled segment point leaves the domain, naming the
    offending segment.
    """
    _validate_path(ke.domain, p)
    return sum(_segment_length(ke, a, b, rel_tol) for a, b in p.segments)


# ---------------------------------------------------------------------------
# graded mesh graph
# ---------------------------------------------------------------------------


def _mesh_nodes(d: CircularDomain, level: int) -> np.ndarray:
    """Polar nodes graded around the origin and around each hole."""
    nodes: List[np.ndarray] = []
    n_theta = 16 << level
    thetas = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    rim = np.exp(1j * thetas)

    m_r = 8 << level
    uniform = np.arange(1, m_r) / m_r
    # geometric progression toward the origin for deep approaches
    toward_zero = np.array([2.0**-k for k in range(int(math.log2(m_r)) + 1, level + 10)])
    radii = np.unique(np.concatenate([uniform, toward_zero]))
    nodes.append((radii[:, None] * rim[None, :]).ravel())

    centers = [h.center for h in d.holes]
    for j, h in enumerate(d.holes):
        others = [abs(h.center - c) for i, c in enumerate(centers) if i != j]
        base = 0.5 * min([1.0 - abs(h.center)] + others)
        if base <= 0:
            continue
        ring_thetas = np.arange(8 << level) * (2.0 * math.pi / (8 << level))
        ring_rim = np.exp(1j * ring_thetas)
        for k in range(level + 3):
            nodes.append(h.center + (base * 2.0**-k) * ring_rim)

    pts = np.concatenate(nodes)
    return pts[_inside_mask(d, pts)]


def _edge_lengths(
    ke: KernelEvaluator, a: np.ndarray, b: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss lengths and validity for a batch of straight edges.

    An edge is valid when its quadrature points and a uniform 9-point
    sample all lie inside the domain.
    """
    xs, ws = _gauss(6)
    ts = 0.5 * (xs + 1.0)
    seg = b - a
    pts = a[:, None] + seg[:, None] * ts[None, :]
    check = a[:, None] + seg[:, None] * ((np.arange(9) + 1.0) / 10.0)[None, :]
    valid = np.all(_inside_mask(ke.domain, pts), axis=1)
    valid &= np.all(_inside_mask(ke.domain, check), axis=1)
    beta = np.zeros(pts.shape)
    idx = np.where(valid)[0]
    if idx.size:
        k, hess = ke.kernel_and_hessian(pts[idx])
        bad = np.any(k <= DEGENERATE_KERNEL, axis=1)
        if np.any(bad):
            valid[idx[bad]] = False
            idx, hess = idx[~bad], hess[~bad]
        beta[idx] = np.sqrt(np.maximum(hess, 0.0))
    weights = np.abs(seg) * 0.5 * (beta @ ws)
    return weights, valid


def _level_distance(
    ke: KernelEvaluator, terminals: Sequence[complex], level: int
) -> Tuple[np.ndarray, List[List[int]], np.ndarray]:
    """All-terminal graph distances and predecessor paths at one level."""
    d = ke.domain
    base = _mesh_nodes(d, level)
    term = np.asarray(terminals, dtype=np.complex128)
    nodes = np.concatenate([term, base])
    coords = np.column_stack([nodes.real, nodes.imag])
    tree = cKDTree(coords)
    k = min(17, len(nodes))
    _, nbr = tree.query(coords, k=k)
    ii = np.repeat(np.arange(len(nodes)), nbr.shape[1])
    jj = nbr.ravel()
    # Keep an edge if either endpoint lists the other: nearest-neighbour
    # lists are asymmetric across density transitions (a node in a sparse
    # ring sees the dense cluster, but not vice versa), so a one-sided
    # `ii < jj` filter would silently disconnect the graph.
    lo = np.minimum(ii, jj)
    hi = np.maximum(ii, jj)
    keep = lo < hi
    pairs = np.unique(np.stack([lo[keep], hi[keep]], axis=1), axis=0)
    ii, jj = pairs[:, 0], pairs[:, 1]
    weights, valid = _edge_lengths(ke, nodes[ii], nodes[jj])
    ii, jj, weights = ii[valid], jj[valid], weights[valid]
    graph = csr_matrix(
        (np.concatenate([weights, weights]), (np.concatenate([ii, jj]), np.concatenate([jj, ii]))),
        shape=(len(nodes), len(nodes)),
    )
    dist, pred = dijkstra(
        graph, directed=False, indices=np.arange(len(term)), return_predecessors=True
    )
    return dist, pred, nodes


def _extract_path(pred_row: np.ndarray, source: int, target: int) -> List[int]:
    chain = [target]
    while chain[-1] != source:
        prev = pred_row[chain[-1]]
        if prev < 0:
            return []
        chain.append(int(prev))
    chain.reverse()
    return chain


def distance_upper(
    ke: KernelEvaluator, w: complex, z: complex, mesh_level: int = 3
) -> DistanceResult:
    """Upper bound for the intrinsic distance from w to z.

    Runs the mesh graph at every refinement up to mesh_level and keeps
    the best (so the value is nonincreasing in mesh_level by
    construction), returning the witnessing polyline.
    """
    for name, pt in (("w", w), ("z", z)):
        if not contains(ke.domain, pt):
            raise ValueError(f"point {name} = {pt} is outside the domain")
    if complex(w) == complex(z):
        return DistanceResult(0.0, Path([w]), mesh_level)
    best = math.inf
    best_path: Optional[List[complex]] = None
    for level in range(mesh_level + 1):
        dist, pred, nodes = _level_distance(ke, [w, z], level)
        if dist[0, 1] < best:
            chain = _extract_path(pred[0], 0, 1)
            if chain:
                best = float(dist[0, 1])
                best_path = [complex(nodes[i]) for i in chain]
    if best_path is None:
        raise ValueError(
            "mesh graph does not connect the endpoints at this refinement; "
            "increase mesh_level"
        )
    return DistanceResult(best, Path(best_path), mesh_level)


def distance_matrix(
    ke: KernelEvaluator, points: Sequence[complex], mesh_level: int = 3
) -> np.ndarray:
    """Pairwise distance upper bounds on one shared mesh graph.

    Because every entry comes from the same graph, the matrix is exactly
    symmetric and satisfies the triangle inequality up to rounding.
    """
    for i, pt in enumerate(points):
        if not contains(ke.domain, pt):
            raise ValueError(f"point {i} = {pt} is outside the domain")
    n = len(points)
    best = np.full((n, n), math.inf)
    for level in range(mesh_level + 1):
        dist, _, _ = _level_distance(ke, points, level)
        best = np.minimum(best, dist[:, :n])
    np.fill_diagonal(best, 0.0)
    return np.minimum(best, best.T)


# ---------------------------------------------------------------------------
# completeness probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeRow:
    kind: str  # "x" (ring-circle crossing) or "y" (midpoint-circle crossing)
    t: float  # global path parameter in [0, 1]
    point: complex
    k_lower: float
    beta: float
    cumulative_length: float
    majorant_log: Optional[float] = None  # only for midpoint crossings


@dataclass(frozen=True)
class ProbeReport:
    rows: Tuple[ProbeRow, ...]
    x_crossings: int
    y_crossings: int
    x_lower_monotone: bool  # per-ring best lower bounds strictly increase
    y_below_majorant: bool


def _circle_crossings(a: complex, b: complex, radius: float) -> List[float]:
    """Parameters u in [0, 1) where |a + u (b-a)| = radius."""
    dz = b - a
    qa = abs(dz) ** 2
    if qa == 0.0:
        return []
    qb = 2.0 * (a.real * dz.real + a.imag * dz.imag)
    qc = abs(a) ** 2 - radius * radius
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    out = []
    for u in ((-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)):
        if 0.0 <= u < 1.0:
            out.append(u)
    return sorted(set(out))


def completeness_probe(
    con: Construction,
    ke: KernelEvaluator,
    approach: Path,
    c: float = 1.0,
    rel_tol: float = 1e-6,
) -> ProbeReport:
    """Walk an approach path and record every ring-circle crossing.

    At a crossing of |z| = x_n the row carries the certified single-tail
    kernel lower bound at the nearest hole of ring n; at a crossing of
    the midpoint circle |z| = y_n it carries the evaluator kernel value
    (a lower bound for the true kernel, since the basis is truncated)
    together with the log of the kernel majorant there.  Cumulative
    lengths integrate the basis metric along the path up to each
    crossing.

    A path that starts outside the first ring and ends inside the last
    one must cross every ring circle; the report counts them.
    """
    d = ke.domain
    _validate_path(d, approach)
    params = con.params
    rings = con.rings
    offsets = {}
    acc = 0
    for r in rings:
        offsets[r.n] = acc
        acc += r.count
    if acc != len(d.holes):
        raise ValueError("evaluator domain does not match the construction")

    events: List[Tuple[float, int, str, int, complex]] = []
    segs = approach.segments
    for i, (a, b) in enumerate(segs):
        for r in rings:
            for kind, radius in (("x", r.x), ("y", r.y)):
                for u in _circle_crossings(a, b, radius):
                    t = (i + u) / len(segs)
                    events.append((t, i, kind, r.n, a + u * (b - a)))
    events.sort(key=lambda e: e[0])

    rows: List[ProbeRow] = []
    cum = 0.0
    prev_seg = 0
    prev_pt = approach.points[0]
    for t, seg_i, kind, n, pt in events:
        # path piece from the previous event to this one, keeping every
        # intermediate polyline vertex so the piece stays on the path
        piece: List[complex] = [prev_pt]
        for j in range(prev_seg + 1, seg_i + 1):
            if piece[-1] != approach.points[j]:
                piece.append(approach.points[j])
        if piece[-1] != pt:
            piece.append(pt)
        cum += path_length(ke, Path(piece), rel_tol) if len(piece) > 1 else 0.0
        beta = metric(ke, pt)
        if kind == "x":
            ring_data = con.ring_for(n)
            theta = math.atan2(pt.imag, pt.real)
            j = int(round(theta * ring_data.count / (2.0 * math.pi))) % ring_data.count
            k_lower = kernel_lower_bound_single(d, offsets[n] + j, pt)
            rows.append(ProbeRow(kind, t, pt, k_lower, beta, cum))
        else:
            k_val = ke.kernel(pt)
            maj = majorant(params, pt, c)
            rows.append(ProbeRow(kind, t, pt, k_val, beta, cum, majorant_log=maj.log))
        prev_seg, prev_pt = seg_i, pt

    x_rows = [r for r in rows if r.kind == "x"]
    y_rows = [r for r in rows if r.kind == "y"]
    best_per_ring: dict = {}
    for (t, seg_i, kind, n, pt), row in zip(events, rows):
        if kind != "x":
            continue
        best_per_ring[n] = max(best_per_ring.get(n, 0.0), row.k_lower)
    by_ring = [best_per_ring[n] for n in sorted(best_per_ring)]
    x_monotone = all(b > a for a, b in zip(by_ring, by_ring[1:]))
    y_ok = all(
        math.log(max(r.k_lower, 5e-324)) <= r.majorant_log for r in y_rows
    )
    return ProbeReport(
        rows=tuple(rows),
        x_crossings=len(x_rows),
        y_crossings=len(y_rows),
        x_lower_monotone=x_monotone,
        y_below_majorant=y_ok,
    )
