"""Log-space scalar arithmetic against plain-float oracles.

Every operation is checked twice: once at desk scale against ordinary
float arithmetic, and once at exponent scales (|log| ~ 1e5..1e6) where
only the exponent identities themselves can serve as the oracle.
"""

import math

import pytest

from bergman.logspace import LogScalar, as_log, log_add, log_sub, log_sum

DESK_VALUES = [1e-300, 2.2e-16, 0.125, 0.7, 1.0, 3.5, 1e12, 8.9e307]


def test_float_round_trip_desk_scale():
    # exp(log(x)) carries |log x| * eps relative error, ~1.6e-13 at the
    # extremes of the double range
    for x in DESK_VALUES:
        assert float(LogScalar.from_float(x)) == pytest.approx(x, rel=1e-12)


def test_zero_and_one():
    assert LogScalar.zero().is_zero
    assert float(LogScalar.zero()) == 0.0
    assert float(LogScalar.one()) == 1.0
    assert LogScalar.from_float(0.0).is_zero


def test_nan_log_rejected():
    with pytest.raises(ValueError):
        LogScalar.from_log(math.nan)


def test_negative_float_rejected():
    with pytest.raises(ValueError):
        LogScalar.from_float(-1.0)


def test_immutability():
    a = LogScalar.one()
    with pytest.raises(AttributeError):
        a.log = 3.0


def test_underflow_and_overflow_to_honest_floats():
    assert float(LogScalar.from_log(-524288.0)) == 0.0
    assert float(LogScalar.from_log(1e6)) == math.inf


def test_multiplication_is_exact_on_exponents():
    a = LogScalar.from_log(-3.0e5)
    b = LogScalar.from_log(1.25e5)
    assert (a * b).log == -3.0e5 + 1.25e5
    assert (a / b).log == -3.0e5 - 1.25e5
    assert (a**3).log == -9.0e5


def test_mul_div_desk_oracle():
    for x in (0.3, 2.0, 17.5):
        for y in (0.9, 4.0):
            assert float(LogScalar.from_float(x) * LogScalar.from_float(y)) == pytest.approx(
                x * y, rel=1e-14
            )
            assert float(LogScalar.from_float(x) / LogScalar.from_float(y)) == pytest.approx(
                x / y, rel=1e-14
            )


def test_addition_matches_float_sum():
    for x in (1e-10, 0.5, 3.0):
        for y in (1e-12, 0.25, 40.0):
            got = float(LogScalar.from_float(x) + LogScalar.from_float(y))
            assert got == pytest.approx(x + y, rel=1e-14)


def test_addition_survives_huge_exponent_gap():
    big = LogScalar.from_log(100.0)
    tiny = LogScalar.from_log(-1e6)
    assert (big + tiny).log == 100.0  # the tiny term is below one ulp


def test_subtraction_matches_float_difference():
    got = float(LogScalar.from_float(3.0) - LogScalar.from_float(1.0))
    assert got == pytest.approx(2.0, rel=1e-14)
    assert (LogScalar.from_float(2.0) - LogScalar.from_float(2.0)).is_zero


def test_subtraction_refuses_negative_result():
    with pytest.raises(ValueError):
        LogScalar.from_float(1.0) - LogScalar.from_float(2.0)


def test_zero_special_cases():
    z = LogScalar.zero()
    one = LogScalar.one()
    assert (z * one).is_zero
    assert (one + z).log == 0.0
    with pytest.raises(ZeroDivisionError):
        one / z
    with pytest.raises(ZeroDivisionError):
        z**-1.0
    assert (z**2.0).is_zero


def test_mixed_python_number_operands():
    a = LogScalar.from_float(0.5)
    assert float(a * 2) == pytest.approx(1.0, rel=1e-15)
    assert float(2 * a) == pytest.approx(1.0, rel=1e-15)
    assert float(1 / a) == pytest.approx(2.0, rel=1e-15)
    assert float(a + 0.5) == pytest.approx(1.0, rel=1e-15)


def test_comparisons_follow_exponent_order():
    a = LogScalar.from_log(-1e6)
    b = LogScalar.from_log(-1e5)
    assert a < b and b > a and a <= a and a == LogScalar.from_log(-1e6)
    assert LogScalar.from_float(2.0) > 1.5


def test_hash_consistent_with_equality():
    assert hash(LogScalar.from_log(-7.0)) == hash(LogScalar.from_log(-7.0))


def test_log_add_oracle():
    assert log_add(math.log(3.0), math.log(4.0)) == pytest.approx(math.log(7.0), rel=1e-15)
    assert log_add(-math.inf, 5.0) == 5.0
    assert log_add(5.0, -math.inf) == 5.0
    assert log_add(math.inf, 1.0) == math.inf


def test_log_sub_oracle():
    assert log_sub(math.log(7.0), math.log(3.0)) == pytest.approx(math.log(4.0), rel=1e-15)
    assert log_sub(2.5, -math.inf) == 2.5
    assert log_sub(1.0, 1.0) == -math.inf
    with pytest.raises(ValueError):
        log_sub(0.0, 1.0)


def test_log_sum_oracle():
    logs = [math.log(v) for v in (1.0, 2.0, 3.5)]
    assert log_sum(logs) == pytest.approx(math.log(6.5), rel=1e-15)
    assert log_sum([]) == -math.inf
    assert log_sum([-math.inf, -math.inf]) == -math.inf
    # max-first normalization keeps widely spread terms finite
    assert log_sum([-1e6, -1e6 + math.log(2.0)]) == pytest.approx(
        -1e6 + math.log(3.0), rel=1e-12
    )


def test_as_log_coercions():
    assert as_log(LogScalar.from_log(-42.0)) == -42.0
    assert as_log(math.e) == pytest.approx(1.0, rel=1e-15)
    assert as_log(0.0) == -math.inf
    with pytest.raises(ValueError):
        as_log(-0.5)
