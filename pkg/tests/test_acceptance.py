"""Acceptance gate: the nine primary criteria, one test (and line) each.

Every criterion is checked at its stated tolerance against independent
oracles: closed-form norms for the restriction inequalities, the
Laurent-series annulus kernel for the Gram engine, hyperbolic-geometry
constants for the disc metric, and brute-force/finite-difference
recomputation elsewhere.  Runtime-limited criteria assert their wall
clock.
"""

import math
import time

import numpy as np
import pytest

from bergman.basis import (
    BasisElement,
    RationalCombination,
    monomial_element,
    standard_basis,
    tail_element,
)
from bergman.closed_forms import (
    AnnulusSpec,
    monomial_norm_disc,
    restriction_factor_annulus,
    restriction_factor_disc,
    tail_norm_annulus,
)
from bergman.construction import (
    ConstructionParams,
    generate,
    ring_lower_bound_log,
    sandwich_scan,
    spacing_constant,
    verify_conditions,
)
from bergman.distance import Path, completeness_probe, distance_upper, metric
from bergman.domain import CircularDomain, HoleSpec
from bergman.hilbert import annulus_kernel_reference, gram_matrix, inner_product
from bergman.laurent import inequality_suite, partial_sum_approximation, split
from bergman.logspace import LogScalar

TWO_HOLES = CircularDomain(
    [
        HoleSpec(0.4, LogScalar.from_log(-5000.0), LogScalar.from_log(-50.0), LogScalar.from_log(-5.0)),
        HoleSpec(-0.35 + 0.2j, LogScalar.from_log(-5000.0), LogScalar.from_log(-50.0), LogScalar.from_log(-5.0)),
    ]
)


def _random_two_hole_function(rng) -> RationalCombination:
    elements, coeffs = [], []
    for _ in range(int(rng.integers(1, 4))):
        elements.append(BasisElement(0j, int(rng.integers(0, 4)), 0.0, None))
        coeffs.append(complex(rng.normal(), rng.normal()))
    for j, hole in enumerate(TWO_HOLES.holes):
        for m in range(1, int(rng.integers(2, 4))):
            elements.append(tail_element(hole, m, j))
            coeffs.append(complex(rng.normal(), rng.normal()))
    if rng.uniform() < 0.5:
        c = 1.5 * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        elements.append(BasisElement(complex(c), -1, 0.0, None))
        coeffs.append(complex(rng.normal(), rng.normal()))
    return RationalCombination(elements, coeffs)


def test_criterion_1_dual_backend_agreement():
    """100 random basis pairs on <=3-hole domains: spectral vs quad2d."""
    rng = np.random.default_rng(3)
    slots = [0.45, -0.45, 0.45j]

    def random_domain(k):
        holes = []
        for i in range(k):
            jitter = 0.06 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            r = math.exp(rng.uniform(math.log(1e-3), math.log(1e-2)))
            holes.append(HoleSpec(slots[i] + jitter, r, 2.0 * r, 4.0 * r))
        return CircularDomain(holes)

    def random_element(d):
        kinds = ["mono", "ext"] + (["tail"] if d.holes else [])
        kind = kinds[rng.integers(0, len(kinds))]
        if kind == "mono":
            return monomial_element(int(rng.integers(0, 6)))
        if kind == "tail":
            j = int(rng.integers(0, len(d.holes)))
            return tail_element(d.holes[j], int(rng.integers(1, 4)), j)
        center = (1.1 + rng.uniform(0.0, 1.0)) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        return BasisElement(complex(center), -int(rng.integers(1, 3)), 0.0, None)

    start = time.perf_counter()
    worst = 0.0
    for i in range(100):
        d = random_domain(i % 4)
        f, g = random_element(d), random_element(d)
        a = inner_product(f, g, d, backend="spectral")
        b = inner_product(f, g, d, backend="quad2d")
        # Cauchy-Schwarz scale: |<f,g>| <= ||f|| ||g||, so this relative
        # measure never divides by a spuriously tiny cross term
        scale = math.sqrt(
            inner_product(f, f, d, backend="spectral").real
            * inner_product(g, g, d, backend="spectral").real
        )
        worst = max(worst, abs(a - b) / scale)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-8
    assert elapsed < 300.0
    print(f"criterion 1 PASS: 100 pairs, max rel disagreement {worst:.3e}, {elapsed:.1f}s")


def test_criterion_2_annulus_kernel_oracle():
    """Gram-engine kernel on the annulus 0.1 < |z| < 1 vs series reference."""
    annulus = CircularDomain([HoleSpec(0j, 0.1, 0.15, 0.2)])
    ke = gram_matrix(standard_basis(annulus, 80, 28), annulus).evaluator()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        rad = rng.uniform(0.15, 0.8)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        z = rad * complex(math.cos(ang), math.sin(ang))
        got = ke.kernel(z)
        ref = annulus_kernel_reference(0.1, z)
        worst = max(worst, abs(got - ref) / abs(ref))
    assert worst <= 1e-6
    print(f"criterion 2 PASS: 20 annulus points, max rel error {worst:.3e}")


def test_criterion_3_restriction_inequality_suite():
    """200 random instances per restriction inequality plus equality cases."""
    rng = np.random.default_rng(13)
    worst_slack = math.inf
    # holomorphic restriction: ||phi||^2 on the small disc vs (r/R)^2 times
    # the large-disc norm, with exact norms from monomial orthogonality
    for _ in range(200):
        big_r = rng.uniform(0.3, 1.5)
        small_r = big_r * rng.uniform(1e-3, 1.0)
        coeffs = rng.normal(size=7) + 1j * rng.normal(size=7)
        norm_small = sum(
            abs(c) ** 2 * monomial_norm_disc(k, small_r) for k, c in enumerate(coeffs)
        )
        norm_big = sum(
            abs(c) ** 2 * monomial_norm_disc(k, big_r) for k, c in enumerate(coeffs)
        )
        slack = float(restriction_factor_disc(small_r, big_r)) - norm_small / norm_big
        worst_slack = min(worst_slack, slack)
        assert slack >= -1e-10
    # tail restriction: outer-annulus share of a pure tail vs the log ratio
    for _ in range(200):
        t = math.exp(rng.uniform(math.log(1e-2), math.log(0.5)))
        s = t * math.exp(-rng.uniform(0.1, 8.0))
        r = s * math.exp(-rng.uniform(0.1, 8.0))
        coeffs = rng.normal(size=6) + 1j * rng.normal(size=6)
        norm_outer = sum(
            abs(c) ** 2 * float(tail_norm_annulus(m, AnnulusSpec(0j, s, t)))
            for m, c in enumerate(coeffs, start=1)
        )
        norm_full = sum(
            abs(c) ** 2 * float(tail_norm_annulus(m, AnnulusSpec(0j, r, t)))
            for m, c in enumerate(coeffs, start=1)
        )
        slack = float(restriction_factor_annulus(r, s, t)) - norm_outer / norm_full
        worst_slack = min(worst_slack, slack)
        assert slack >= -1e-10
    # equality cases reproduce the factors exactly
    ratio_const = monomial_norm_disc(0, 0.3) / monomial_norm_disc(0, 0.8)
    assert ratio_const == pytest.approx(float(restriction_factor_disc(0.3, 0.8)), rel=1e-12)
    r, s, t = 1e-9, 1e-4, 1e-2
    ratio_tail = float(tail_norm_annulus(1, AnnulusSpec(0j, s, t))) / float(
        tail_norm_annulus(1, AnnulusSpec(0j, r, t))
    )
    assert ratio_tail == pytest.approx(float(restriction_factor_annulus(r, s, t)), rel=1e-12)
    print(f"criterion 3 PASS: 400 instances, min slack {worst_slack:.3e}, equality cases exact")


def test_criterion_4_conditions_at_exact_parameters():
    """Certified spacing and series conditions for rings up to 10^4."""
    start = time.perf_counter()
    params = ConstructionParams(n_max=10**4)
    spacing = spacing_constant(params)
    report = verify_conditions(params)
    elapsed = time.perf_counter() - start
    assert spacing.value == 2.0 * math.pi
    assert spacing.certified
    assert not any(spacing.degenerate)
    assert report.condition1_from_index == 40
    assert math.isfinite(report.series3_partial.log) and math.isfinite(report.series3_tail.log)
    assert math.isfinite(report.series4_partial.log) and math.isfinite(report.series4_tail.log)
    assert report.series3_converges and report.series4_converges
    assert not report.product_lower_bound.is_zero  # positive in log space
    assert not report.epsilon.is_zero
    assert report.conditions_hold
    assert elapsed < 60.0
    print(
        "criterion 4 PASS: C = 2pi certified to ring 10^4, onset index "
        f"{report.condition1_from_index}, log product {report.product_lower_bound.log:.6e}, "
        f"log epsilon {report.epsilon.log:.6e}, {elapsed:.1f}s"
    )


def test_criterion_5_sandwich_reproduction():
    """Ring lower bounds grow past the midpoint majorant sup."""
    params = ConstructionParams(n_max=1000)
    report = sandwich_scan(params)
    assert report.lower_monotone  # strictly increasing over n = 2..1000
    assert report.verdict
    assert report.n_star is not None
    threshold = report.m1_log + math.log(report.c)
    star_idx = report.n_star - params.n0
    assert all(v > threshold for v in report.lower_logs[star_idx:])
    assert all(v <= threshold for v in report.lower_logs[:star_idx])
    # n = 3 spot value against direct formula arithmetic
    spot = math.exp(ring_lower_bound_log(params, 3))
    formula = 3.0**20 / (2.0 * math.pi * (2.0 * math.pi) ** 2 * (3.0**19 + math.log(2.0)))
    assert spot == pytest.approx(formula, rel=1e-12)
    assert abs(spot - 0.0121) < 5e-5
    print(
        f"criterion 5 PASS: monotone to ring 1000, crossing at n* = {report.n_star}, "
        f"spot value {spot:.6f}"
    )


def test_criterion_6_decomposition_suite():
    """20 random functions on the handcrafted two-hole configuration."""
    rng = np.random.default_rng(17)
    worst_residual = 0.0
    worst_slack = math.inf
    worst_indep = 0.0
    for _ in range(20):
        F = _random_two_hole_function(rng)
        result = split(F, TWO_HOLES)
        worst_residual = max(worst_residual, result.residual)
        report = inequality_suite(F, TWO_HOLES)
        worst_slack = min(worst_slack, report.min_slack)
        assert report.ok
        # peeling depth must not change the extracted tails
        shallow = split(F, TWO_HOLES, upto=1)
        assert [e.descriptor() for e in shallow.parts[0].elements] == [
            e.descriptor() for e in result.parts[0].elements
        ]
        for a, b in zip(shallow.parts[0].coeffs, result.parts[0].coeffs):
            worst_indep = max(worst_indep, abs(a - b))
    assert worst_residual < 1e-10
    assert worst_slack >= -1e-9
    assert worst_indep <= 1e-12
    print(
        f"criterion 6 PASS: 20 functions, max residual {worst_residual:.3e}, "
        f"min slack {worst_slack:.3e}, tail depth-independence {worst_indep:.3e}"
    )


def test_criterion_7_partial_sum_tail_bound():
    """Measured approximation gap under the certified tail bound."""
    rng = np.random.default_rng(29)
    F = _random_two_hole_function(rng)
    gaps, bounds = [], []
    for upto in (0, 1, 2):
        approx = partial_sum_approximation(F, TWO_HOLES, upto=upto)
        gaps.append(float(approx.measured_gap_sq))
        bounds.append(float(approx.tail_bound))
        assert approx.measured_gap_sq <= approx.tail_bound * (1.0 + 1e-9) + 1e-12
    assert bounds[0] >= bounds[1] >= bounds[2]
    print(f"criterion 7 PASS: gaps {gaps} under bounds {bounds}, nonincreasing")


def test_criterion_8_metric_distance_oracles():
    """Disc metric, geodesic distance, and hessian cross-check."""
    disc = CircularDomain([])
    ke = gram_matrix([monomial_element(k) for k in range(25)], disc).evaluator()
    beta0 = metric(ke, 0.0)
    assert beta0 == pytest.approx(math.sqrt(2.0), rel=1e-6)
    target = math.sqrt(2.0) * math.atanh(0.5)
    result = distance_upper(ke, 0.0, 0.5, mesh_level=2)
    assert abs(result.value - target) <= 1e-3
    assert abs(result.value - 0.776819) <= 1e-3
    # analytic log-hessian vs centered finite differences at 50 points
    rng = np.random.default_rng(21)
    h = 1e-4
    worst = 0.0
    for _ in range(50):
        z = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
        if abs(z) > 0.7:
            z *= 0.7 / abs(z)
        analytic = ke.log_hessian(z)
        stencil = np.array([z + h, z - h, z + 1j * h, z - 1j * h, z])
        logs = np.log(ke.kernel_values(stencil))
        fd = (logs[0] + logs[1] + logs[2] + logs[3] - 4.0 * logs[4]) / (4.0 * h * h)
        worst = max(worst, abs(fd - analytic) / abs(analytic))
    assert worst <= 1e-5
    print(
        f"criterion 8 PASS: metric(0) = {beta0:.12f}, distance {result.value:.6f}, "
        f"max hessian FD deviation {worst:.3e}"
    )


def test_criterion_9_completeness_probe():
    """Tame three-ring family: crossings, growth, and majorant domination."""
    params = ConstructionParams(
        n_max=4,
        ring_exponent=1,
        x_exponent=1,
        tame_overrides={
            2: {"log_r": math.log(1e-20), "log_s": math.log(1e-2), "log_t": math.log(0.05)},
            3: {"log_r": math.log(1e-25), "log_s": math.log(1e-2), "log_t": math.log(0.05)},
            4: {"log_r": math.log(1e-30), "log_s": math.log(1e-2), "log_t": math.log(0.05)},
        },
    )
    con = generate(params)
    ke = gram_matrix(standard_basis(con.domain, 8, 2), con.domain).evaluator()
    approach = Path([0.9 * np.exp(0.3j), 0.05 * np.exp(0.3j)])
    report = completeness_probe(con, ke, approach)
    rings = len(con.rings)
    assert report.x_crossings == rings  # one crossing registered per ring
    assert report.y_crossings == rings
    assert report.x_lower_monotone
    assert report.y_below_majorant
    lowers = [row.k_lower for row in report.rows if row.kind == "x"]
    assert all(b > a for a, b in zip(lowers, lowers[1:]))
    print(
        f"criterion 9 PASS: {report.x_crossings} ring crossings with bounds "
        f"{[round(v, 5) for v in lowers]}, midpoint samples below the majorant"
    )
