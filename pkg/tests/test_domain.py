"""Domain geometry, validation verdicts, and the strict JSON schema.

The membership oracle used here is the argument principle: for a point z
of a domain bounded by circles, summing the winding contributions of the
oriented boundary circles around z gives 1 inside and 0 outside.  The
winding number of each circle is computed by brute trapezoid sampling of
(1/2 pi i) * integral dw/(w - z), fully independent of contains().
"""

import cmath
import math

import numpy as np
import pytest

from bergman.domain import (
    CircularDomain,
    HoleSpec,
    boundary_circles,
    contains,
    domain_from_dict,
    domain_to_dict,
    hole_condition_terms,
    hole_conditions_hold,
    load_domain,
    save_domain,
    validate_configuration,
)
from bergman.logspace import LogScalar


def _hole(center, r, s, t):
    return HoleSpec(complex(center), r, s, t)


def _winding(center: complex, radius: float, orientation: int, z: complex) -> float:
    """Brute winding number of an oriented circle around z."""
    n = 4096
    theta = 2.0 * math.pi * np.arange(n) / n
    w = center + radius * np.exp(1j * theta)
    dw = 1j * radius * np.exp(1j * theta) * (2.0 * math.pi / n)
    val = np.sum(dw / (w - z)) / (2.0j * math.pi)
    return float(orientation) * float(val.real)


def _membership_oracle(d: CircularDomain, z: complex) -> bool:
    total = 0.0
    for c in boundary_circles(d):
        radius = float(c.radius)
        if radius == 0.0:
            continue  # circle of underflowed radius cannot enclose z
        if abs(abs(z - c.center) - radius) < 1e-3:
            raise ValueError("oracle point too close to a boundary circle")
        total += _winding(c.center, radius, c.orientation, z)
    if d.punctured and z == 0:
        return False
    return round(total) == 1


SAMPLE = CircularDomain(
    holes=[
        _hole(0.4, 0.05, 0.08, 0.1),
        _hole(-0.3 + 0.3j, 0.02, 0.05, 0.09),
    ],
    punctured=False,
)


def test_contains_matches_winding_oracle():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 60:
        z = complex(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2))
        try:
            expected = _membership_oracle(SAMPLE, z)
        except ValueError:
            continue
        assert contains(SAMPLE, z) == expected, f"membership mismatch at {z}"
        checked += 1


def test_contains_handles_puncture_and_rim():
    punct = CircularDomain(holes=SAMPLE.holes, punctured=True)
    assert not contains(punct, 0j)
    assert contains(SAMPLE, 0j)
    assert not contains(SAMPLE, 1.0 + 0j)
    assert not contains(SAMPLE, cmath.rect(1.000001, 2.0))
    # points on or inside a hole's r-circle are outside the open domain
    assert not contains(SAMPLE, complex(0.4, 0.05))
    assert not contains(SAMPLE, complex(0.45, 0.0))


def test_contains_with_log_scale_hole():
    d = CircularDomain([_hole(0.5, LogScalar.from_log(-5000.0), LogScalar.from_log(-50.0), LogScalar.from_log(-5.0))])
    assert contains(d, 0.5 + 1e-200j) is True  # far outside exp(-5000)
    assert contains(d, complex(0.5, 0.0)) is False  # dead center


def test_hole_spec_guards():
    with pytest.raises(ValueError):
        _hole(0.4, 0.0, 0.1, 0.2)  # zero radius
    with pytest.raises(ValueError):
        _hole(0.4, math.exp(-800) * 0.0, 0.1, 0.2)  # underflowed float
    with pytest.raises(ValueError):
        _hole(0.4, 0.2, 0.1, 0.3)  # r >= s
    h = _hole(0.4, LogScalar.from_log(-5000.0), 0.1, 0.2)
    assert h.r_float == 0.0  # honest underflow on conversion only


def test_without_holes():
    kept = SAMPLE.without_holes([0])
    assert kept.n_holes == 1
    assert kept.holes[0].center == SAMPLE.holes[1].center


def test_boundary_circles_orientations():
    circles = boundary_circles(SAMPLE)
    assert circles[0].orientation == +1
    assert float(circles[0].radius) == 1.0
    assert [c.orientation for c in circles[1:]] == [-1, -1]


def test_condition_terms_formulas():
    # desk-scale hole with hand-computable terms
    h = _hole(0.5, math.exp(-20.0), math.exp(-10.0), math.exp(-5.0))
    terms = hole_condition_terms(h)
    assert terms["log_t"] == pytest.approx(-5.0)
    assert terms["r2_over_z2"] == pytest.approx(math.exp(-40.0) / 0.25, rel=1e-12)
    expected_sum3 = math.exp(-30.0) + math.exp(-5.0) + math.sqrt(2.0 * 10.0 / 20.0)
    assert terms["sum3"] == pytest.approx(expected_sum3, rel=1e-12)
    expected_sum4 = 2.0 * 5.0 / 20.0 + math.sqrt(1.0) + math.exp(-5.0)
    assert terms["sum4"] == pytest.approx(expected_sum4, rel=1e-12)


def test_conditions_hold_boundary_cases():
    # passes everything: r astronomically small, s << t << 1
    good = _hole(0.5, LogScalar.from_log(-1e6), LogScalar.from_log(-40.0), LogScalar.from_log(-4.5))
    assert hole_conditions_hold(good)
    # t too large (log t = -3 > -4)
    big_t = _hole(0.5, LogScalar.from_log(-1e6), LogScalar.from_log(-40.0), LogScalar.from_log(-3.0))
    assert not hole_conditions_hold(big_t)
    # s above t: sum3 term s/t > 1
    s_above = _hole(0.5, LogScalar.from_log(-1e6), LogScalar.from_log(-4.0), LogScalar.from_log(-5.0))
    assert not hole_conditions_hold(s_above)
    # r too close to s: sqrt(2 log s/log r) >= 1
    r_close = _hole(0.5, LogScalar.from_log(-60.0), LogScalar.from_log(-40.0), LogScalar.from_log(-5.0))
    assert not hole_conditions_hold(r_close)


def test_validate_ok_configuration():
    d = CircularDomain(
        [
            _hole(0.5, LogScalar.from_log(-1e6), LogScalar.from_log(-40.0), LogScalar.from_log(-4.5)),
            _hole(-0.5, LogScalar.from_log(-1e6), LogScalar.from_log(-40.0), LogScalar.from_log(-4.5)),
        ]
    )
    rep = validate_configuration(d)
    assert rep.ok
    assert rep.violations == []
    assert rep.condition1_ok == [True, True]
    assert rep.min_condition1_index == 0


def test_validate_structural_failures():
    # t-discs overlapping
    overlap = CircularDomain(
        [_hole(0.30, 1e-9, 1e-4, 0.1), _hole(0.32, 1e-9, 1e-4, 0.1)]
    )
    rep = validate_configuration(overlap)
    assert not rep.ok
    assert any("overlap" in v for v in rep.violations)

    # t-disc escaping the unit disc
    escape = CircularDomain([_hole(0.95, 1e-9, 1e-4, 0.1)])
    rep = validate_configuration(escape)
    assert not rep.ok
    assert any("not contained" in v for v in rep.violations)

    # origin swallowed by the r-disc
    swallow = CircularDomain([_hole(1e-12, 1e-6, 1e-4, 1e-2)])
    rep = validate_configuration(swallow)
    assert not rep.ok
    assert any("origin" in v for v in rep.violations)


def test_validate_condition_index_partial():
    # first hole fails the smallness conditions (t too big), second passes
    d = CircularDomain(
        [
            _hole(0.5, LogScalar.from_log(-1e6), LogScalar.from_log(-40.0), LogScalar.from_log(-3.5)),
            _hole(-0.5, LogScalar.from_log(-1e6), LogScalar.from_log(-40.0), LogScalar.from_log(-4.5)),
        ]
    )
    rep = validate_configuration(d)
    assert rep.ok  # structurally fine
    assert rep.condition1_ok == [False, True]
    assert rep.min_condition1_index == 1


def test_json_round_trip(tmp_path):
    d = CircularDomain(
        [_hole(0.4 + 0.1j, LogScalar.from_log(-524288.0), LogScalar.from_log(-2.0), LogScalar.from_log(-1.5))],
        punctured=True,
    )
    doc = domain_to_dict(d)
    back = domain_from_dict(doc)
    assert back == d
    path = tmp_path / "dom.json"
    save_domain(d, str(path))
    assert load_domain(str(path)) == d


def test_json_schema_is_strict():
    doc = domain_to_dict(SAMPLE)
    doc["extra"] = 1
    with pytest.raises(ValueError, match="unknown keys"):
        domain_from_dict(doc)
    doc.pop("extra")
    doc["holes"][0]["radius"] = 0.1
    with pytest.raises(ValueError, match="unknown keys"):
        domain_from_dict(doc)
    with pytest.raises(ValueError, match="missing key"):
        domain_from_dict({"holes": [{"center": [0.1, 0.0]}], "punctured": False})
