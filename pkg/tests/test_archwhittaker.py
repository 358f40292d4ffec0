"""The exponential integral and the archimedean Whittaker data."""

import math

import pytest

from siegelweil.archwhittaker import (
    arch_central_derivative,
    arch_central_value,
    arch_green_factor,
    arch_whittaker_minus,
    exp_integral_e1,
)

# Reference values computed with mpmath at 30 digits.
E1_TABLE = {
    0.05: 2.4678984885099743696,
    0.5: 0.55977359477616081175,
    1.0: 0.21938393439552027368,
    4.0: 0.0037793524098489064789,
    12.566370614359172: 2.5829967696730293935e-7,   # 4 pi
    25.132741228718345: 4.6601313975109846156e-13,  # 8 pi
    80.0: 2.2285432586884729112e-37,
}


def test_e1_against_reference_values():
    for x, want in E1_TABLE.items():
        got = exp_integral_e1(x)
        assert abs(got - want) <= 5e-14 * abs(want), (x, got, want)


def test_e1_against_scipy():
    import numpy as np
    from scipy.special import exp1

    for x in np.geomspace(1e-4, 60.0, 120):
        got = exp_integral_e1(float(x))
        want = float(exp1(float(x)))
        assert abs(got - want) <= 1e-12 * max(abs(want), 1e-300), x


def test_e1_derivative_is_minus_exp_over_x():
    for x in (0.3, 0.9, 1.1, 3.0, 10.0):
        h = 1e-6 * x
        num = (exp_integral_e1(x + h) - exp_integral_e1(x - h)) / (2 * h)
        assert abs(num + math.exp(-x) / x) < 1e-7 * math.exp(-x) / x + 1e-15


def test_e1_domain():
    with pytest.raises(ValueError):
        exp_integral_e1(0.0)
    with pytest.raises(ValueError):
        exp_integral_e1(-1.0)


def test_e1_series_cf_crossover_is_smooth():
    # the two evaluation routes hand over at x = 1 without a seam: both
    # sides sit on the reference curve to full precision
    from scipy.special import exp1

    for x in (0.99, 0.999999, 1.0, 1.000001, 1.01):
        got, want = exp_integral_e1(x), float(exp1(x))
        assert abs(got - want) <= 1e-13 * want, x


def test_arch_central_value_is_the_positivity_indicator():
    assert arch_central_value(5) == 1
    assert arch_central_value(-3) == 0
    with pytest.raises(ValueError):
        arch_central_value(0)


def test_arch_functions_tie_together():
    """Green factor = (1/2) E1; derivative = -(1/4) E1: one transcendental,
    two normalizations."""
    for alpha in (-1, -2, -7):
        for y in (0.5, 1.0, 3.0):
            x = 4 * math.pi * abs(alpha) * y
            e1 = exp_integral_e1(x)
            assert abs(arch_green_factor(alpha, y) - 0.5 * e1) < 1e-16 + 1e-14 * e1
            assert abs(arch_central_derivative(alpha, y) + 0.25 * e1) < 1e-16 + 1e-14 * e1


def test_arch_derivative_ode():
    """d/dy of the central derivative is the value of the negative-side
    Whittaker function divided by y."""
    for alpha in (-1, -3):
        for y in (0.5, 1.0, 2.0):
            h = 1e-6 * y
            num = (
                arch_central_derivative(alpha, y + h)
                - arch_central_derivative(alpha, y - h)
            ) / (2 * h)
            want = arch_whittaker_minus(alpha, y) / y
            assert abs(num - want) <= 1e-6 * abs(want), (alpha, y)


def test_whittaker_minus_decay():
    # exponential decay in |alpha| y, positive sign
    v1 = arch_whittaker_minus(-1, 1.0)
    v2 = arch_whittaker_minus(-2, 1.0)
    assert 0 < v2 < v1
    assert abs(v1 - 0.25 * math.exp(-4 * math.pi)) < 1e-20
