"""Tests for the certified hole-ring construction.

Fixed reference values below are derived by hand from the defining rules
(ring n: n^5 holes on radius n^-5, log r_n = -n^19, log s_n = -n,
t_n = 1/(3C n^10) with C = 2 pi) or frozen from independent formula
evaluations noted inline.
"""

import math

import numpy as np
import pytest

from bergman.construction import (
    SPACING_C,
    ConstructionParams,
    generate,
    majorant,
    ring,
    ring_lower_bound_log,
    sandwich_scan,
    spacing_constant,
    verify_conditions,
)
from bergman.logspace import LogScalar

DEFAULT = ConstructionParams(n_max=64)


# ---------------------------------------------------------------------------
# ring rules
# ---------------------------------------------------------------------------


def test_ring_two_matches_hand_computation():
    r = ring(DEFAULT, 2)
    assert r.n == 2
    assert r.count == 32  # 2^5
    assert r.x == 2.0**-5
    assert r.log_x == pytest.approx(-5.0 * math.log(2.0), rel=1e-15)
    assert r.log_r == -(2.0**19)  # exactly -524288
    assert r.log_s == -2.0
    # t_2 = 1/(3 * 2pi * 2^10) so log t_2 = -log(6 pi * 1024)
    assert r.log_t == pytest.approx(-math.log(6.0 * math.pi * 1024.0), rel=1e-15)
    # midpoint radius between rings 2 and 3
    assert r.y == pytest.approx(0.5 * (2.0**-5 + 3.0**-5), rel=1e-15)
    assert r.y == pytest.approx(0.01768261316872428, rel=1e-15)


def test_ring_radii_representable_at_ring_one_million():
    params = ConstructionParams(n_max=10**6)
    r = ring(params, 10**6)
    # log r = -(10^6)^19 = -1e114 is a perfectly ordinary float even
    # though r itself is far below any denormal.
    assert r.log_r == -1e114
    assert r.log_s == -1e6
    assert r.count == 10**30
    assert r.x == 1e-30
    assert LogScalar.from_log(r.log_r).log == -1e114
    assert float(LogScalar.from_log(r.log_r)) == 0.0  # honest underflow


def test_ring_guards():
    with pytest.raises(ValueError):
        ring(DEFAULT, 1)  # below n0
    with pytest.raises(ValueError):
        ConstructionParams(n_max=4, n0=1)
    with pytest.raises(ValueError):
        ConstructionParams(n_max=1)  # n_max < n0
    with pytest.raises(ValueError):
        ConstructionParams(n_max=4, ring_exponent=0)
    with pytest.raises(ValueError):
        ConstructionParams(n_max=4, s_rate=0.0)
    with pytest.raises(ValueError):
        ConstructionParams(n_max=4, tame_overrides={9: {"log_r": -5.0}})
    with pytest.raises(ValueError):
        ConstructionParams(n_max=4, tame_overrides={2: {"log_q": -5.0}})
    # an override that breaks r < min(s, t) is rejected at ring build time
    bad = ConstructionParams(n_max=4, tame_overrides={2: {"log_r": -0.5}})
    with pytest.raises(ValueError, match="need r < min"):
        ring(bad, 2)


def test_tame_override_changes_only_named_ring():
    params = ConstructionParams(
        n_max=4, tame_overrides={3: {"log_r": math.log(1e-9), "log_t": math.log(0.002)}}
    )
    r3 = ring(params, 3)
    assert r3.log_r == math.log(1e-9)
    assert r3.log_t == math.log(0.002)
    assert r3.log_s == -3.0  # untouched field keeps the rule value
    r2 = ring(params, 2)
    assert r2.log_r == -(2.0**19)


# ---------------------------------------------------------------------------
# domain materialization
# ---------------------------------------------------------------------------


def test_generate_is_ring_major_and_punctured():
    con = generate(ConstructionParams(n_max=3))
    assert con.domain.punctured
    assert len(con.domain.holes) == 32 + 243
    # ring 2 comes first, in angular order starting at angle 0
    assert con.domain.holes[0].center == complex(2.0**-5, 0.0)
    step = 2.0 * math.pi / 32
    h1 = con.domain.holes[1]
    assert h1.center == pytest.approx(
        2.0**-5 * complex(math.cos(step), math.sin(step)), rel=1e-15
    )
    # hole 32 opens ring 3
    assert con.domain.holes[32].center == complex(3.0**-5, 0.0)
    assert con.ring_for(3).n == 3
    # every hole of ring 2 carries the ring's log radii
    assert con.domain.holes[5].r.log == -(2.0**19)


def test_generate_refuses_oversized_domains():
    with pytest.raises(ValueError, match="exceed the materialization cap"):
        generate(ConstructionParams(n_max=12))


# ---------------------------------------------------------------------------
# spacing constant
# ---------------------------------------------------------------------------


def test_spacing_constant_certifies_two_sided_chord_bounds():
    sp = spacing_constant(DEFAULT)
    assert sp.value == SPACING_C
    assert sp.certified
    assert sp.t_within_ok and sp.t_across_ok and sp.y_circles_clear
    assert not any(sp.degenerate)
    assert all(m >= 0.0 for m in sp.lower_margins)
    assert all(m >= 0.0 for m in sp.upper_margins)
    # ring 2 chord by hand: 2 * 2^-5 * sin(pi/32), squeezed between
    # 1/(C 2^10) and C/2^10
    chord2 = sp.chords[0]
    assert chord2 == pytest.approx(2.0 * 2.0**-5 * math.sin(math.pi / 32.0), rel=1e-15)
    assert chord2 == pytest.approx(0.006126071270597538, rel=1e-14)
    assert 1.0 / (SPACING_C * 2.0**10) <= chord2 <= SPACING_C / 2.0**10


def test_spacing_constant_subrange_and_guard():
    sp = spacing_constant(DEFAULT, n_range=(5, 9))
    assert sp.rings == (5, 6, 7, 8, 9)
    assert sp.certified
    with pytest.raises(ValueError):
        spacing_constant(DEFAULT, n_range=(1, 9))
    with pytest.raises(ValueError):
        spacing_constant(DEFAULT, n_range=(9, 5))


def test_spacing_constant_certifies_at_extreme_scale():
    params = ConstructionParams(n_max=10**6)
    sp = spacing_constant(params, n_range=(10**6, 10**6))
    assert sp.certified
    assert not sp.degenerate[0]


# ---------------------------------------------------------------------------
# condition report
# ---------------------------------------------------------------------------


def test_conditions_hold_and_onset_index():
    rep = verify_conditions(ConstructionParams(n_max=256))
    assert rep.conditions_hold
    # first ring from which all smallness conditions hold, frozen from a
    # direct scan of the defining inequalities
    assert rep.condition1_from_index == 40
    assert rep.condition1_tail_monotone
    assert rep.series3_converges and rep.series4_converges
    assert not rep.product_lower_bound.is_zero
    assert not rep.epsilon.is_zero
    assert 0.0 < rep.beta_infimum < 1.0
    assert rep.axis_majorant_converges
    assert rep.axis_majorant_sum is not None
    assert rep.ym_tail_monotone
    assert math.isfinite(rep.ym_sup_bound.log)
    # epsilon <= product since the extra factor is min(1, inf beta) <= 1
    assert rep.epsilon.log <= rep.product_lower_bound.log


def test_condition_series_values_frozen():
    rep = verify_conditions(ConstructionParams(n_max=256))
    # grouped count * (s/t + sqrt(2 log s / log r)) series, log scale
    assert rep.series3_partial.log == pytest.approx(30.83576073891784, rel=1e-13)
    # grouped count/(-log r) = n^-14 series: partial ~ 2^-14 * (1 + ...)
    assert rep.series4_partial.log == pytest.approx(-9.700577157024133, rel=1e-13)
    # the peeling product's log is about minus the grouped series sum:
    # astronomically small yet strictly positive
    assert rep.product_lower_bound.log == pytest.approx(-669534859.8753061, rel=1e-10)
    assert rep.epsilon.log == pytest.approx(-669534861.7059854, rel=1e-10)
    assert rep.beta_infimum == pytest.approx(0.16030462672632406, rel=1e-12)


def test_condition_totals_shrink_as_truncation_grows():
    totals = {}
    for n_max in (64, 128, 256):
        rep = verify_conditions(ConstructionParams(n_max=n_max))
        totals[n_max] = (
            float(np.logaddexp(rep.series3_partial.log, rep.series3_tail.log)),
            float(np.logaddexp(rep.series4_partial.log, rep.series4_tail.log)),
            rep.series3_partial.log,
            rep.series4_partial.log,
        )
    # partial sums can only grow with more rings...
    assert totals[64][2] <= totals[128][2] <= totals[256][2]
    assert totals[64][3] <= totals[128][3] <= totals[256][3]
    # ...while partial + certified tail can only shrink (integral-test
    # tails at a later cutoff absorb the freshly summed block)
    assert totals[64][0] >= totals[128][0] >= totals[256][0]
    assert totals[64][1] >= totals[128][1] >= totals[256][1]


def test_divergent_exponents_fail_the_verdict_without_raising():
    rep = verify_conditions(ConstructionParams(n_max=48, r_exponent=6))
    assert not rep.conditions_hold
    assert not rep.series3_converges
    assert not rep.series4_converges
    assert rep.series4_tail.log == math.inf
    assert rep.epsilon.is_zero
    assert any("diverges" in note for note in rep.notes)


# ---------------------------------------------------------------------------
# kernel majorant
# ---------------------------------------------------------------------------


def _brute_hole_sum(params, z):
    """Exact disc kernel plus per-hole sum over every materialized hole."""
    total = 1.0 / (math.pi * (1.0 - abs(z) ** 2) ** 2)
    for n in range(params.n0, params.n_max + 1):
        r = ring(params, n)
        theta = 2.0 * np.pi * np.arange(r.count) / r.count
        d2 = np.abs(z - r.x * np.exp(1j * theta)) ** 2
        with np.errstate(under="ignore"):
            r2 = math.exp(2.0 * r.log_r) if 2.0 * r.log_r > -745.0 else 0.0
        total += float(np.sum(1.0 / (d2 * (-r.log_r))))
        total += float(np.sum(r2 / (d2 - r2) ** 2))
    return total


def test_majorant_dominates_exact_hole_sum():
    params = ConstructionParams(n_max=8)
    rng = np.random.default_rng(5)
    for _ in range(10):
        rad = math.exp(rng.uniform(math.log(2e-4), math.log(0.9)))
        ang = rng.uniform(0.0, 2.0 * math.pi)
        z = rad * complex(math.cos(ang), math.sin(ang))
        bound = float(majorant(params, z))
        exact = _brute_hole_sum(params, z)
        assert bound >= exact


def test_majorant_scales_exactly_with_c():
    params = ConstructionParams(n_max=8)
    base = majorant(params, 0.035)
    tripled = majorant(params, 0.035, c=3.0)
    # log-space product keeps the constant exact to the last bit
    assert tripled.log == base.log + math.log(3.0)


def test_majorant_guards():
    params = ConstructionParams(n_max=8)
    with pytest.raises(ValueError, match="c must be positive"):
        majorant(params, 0.035, c=0.0)
    with pytest.raises(ValueError, match="punctured unit disc"):
        majorant(params, 0.0)
    with pytest.raises(ValueError, match="punctured unit disc"):
        majorant(params, 1.2)
    with pytest.raises(ValueError, match="deeper than the scanned rings"):
        majorant(params, 1e-6)
    with pytest.raises(ValueError, match="inside or on a hole"):
        majorant(params, complex(2.0**-5, 0.0))  # a ring-2 hole center
    tame = ConstructionParams(
        n_max=8,
        tame_overrides={
            2: {"log_r": math.log(1e-3), "log_s": math.log(2e-3), "log_t": math.log(4e-3)}
        },
    )
    with pytest.raises(ValueError, match="inside or on a hole"):
        majorant(tame, complex(2.0**-5 + 5e-4, 0.0))


def test_majorant_refuses_forced_enumeration_of_huge_rings():
    # ring 23 has 23^5 = 6436343 holes; a probe exactly on its circle
    # cannot be separated by the radial gap, so the point-by-point path
    # is required and must refuse rather than silently under-bound.
    params = ConstructionParams(n_max=23)
    with pytest.raises(ValueError, match="needs point-by-point distances"):
        majorant(params, complex(23.0**-5, 0.0))


# ---------------------------------------------------------------------------
# sandwich scan
# ---------------------------------------------------------------------------


def test_ring_lower_bound_spot_value():
    # n = 3: x-circle bound n^20 / (2 pi C^2 (n^19 + log 2)) with C = 2 pi
    value = math.exp(ring_lower_bound_log(DEFAULT, 3))
    reference = 3.0**20 / (8.0 * math.pi**3 * (3.0**19 + math.log(2.0)))
    assert value == pytest.approx(reference, rel=1e-12)
    assert value == pytest.approx(0.012094325405237048, rel=1e-13)


def test_sandwich_scan_certifies_bounded_vs_growing():
    report = sandwich_scan(ConstructionParams(n_max=1000))
    assert report.verdict
    assert report.lower_monotone
    # sup of the midpoint-circle majorant rows (attained at the first
    # midpoint, frozen from an independent run)
    assert report.m1_log == pytest.approx(-0.42887969195979647, rel=1e-12)
    # first ring whose certified lower bound exceeds the sup
    assert report.n_star == 162
    assert math.exp(ring_lower_bound_log(ConstructionParams(n_max=1000), 162)) > math.exp(
        report.m1_log
    )
    kinds = {row.kind for row in report.rows}
    assert kinds == {"x", "y"}
    y_rows = [row for row in report.rows if row.kind == "y"]
    x_rows = [row for row in report.rows if row.kind == "x"]
    assert len(y_rows) == 500 - 1  # midpoint rows stop at n_max/2
    assert len(x_rows) == 999
    assert max(row.value_log for row in y_rows) == report.m1_log


def test_sandwich_crossing_found_past_the_truncation():
    # With only 63 rings scanned the crossing ring is beyond the table,
    # but the closed-form lower bound still locates it.
    report = sandwich_scan(ConstructionParams(n_max=64))
    assert report.verdict
    assert report.n_star == 162
    assert report.m1_log == pytest.approx(-0.42887969195979647, rel=1e-12)


def test_sandwich_scan_divergent_tail_fails_verdict():
    report = sandwich_scan(ConstructionParams(n_max=16, r_exponent=6))
    assert not report.verdict
    assert report.n_star is None
    assert report.m1_log == math.inf
    assert all(row.value_log == math.inf for row in report.rows if row.kind == "y")


def test_sandwich_scan_decreasing_lower_bounds_fail_verdict():
    # r_exponent > 2 * chord_exponent makes the ring bounds shrink
    report = sandwich_scan(ConstructionParams(n_max=16, r_exponent=21))
    assert not report.lower_monotone
    assert report.n_star is None
    assert not report.verdict


def test_sandwich_scan_stalling_growth_reports_no_crossing():
    # r_exponent = 2 * chord_exponent: the bounds increase toward a
    # finite asymptote below the sup, so the search must terminate
    # without certifying a crossing.
    report = sandwich_scan(ConstructionParams(n_max=4, r_exponent=20))
    assert report.lower_monotone
    assert report.n_star is None
    assert not report.verdict


def test_sandwich_scan_rejects_nonpositive_c():
    with pytest.raises(ValueError, match="c must be positive"):
        sandwich_scan(DEFAULT, c=0.0)
