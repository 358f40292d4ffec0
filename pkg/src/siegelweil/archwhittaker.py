"""Archimedean Whittaker data for weight one.

At the real place the two local lines are definite of opposite signs.  On
the positive-definite line the central Whittaker value at a positive target
is a constant (normalized here to 1) and vanishes at negative targets; the
incoherent derivative at a negative target and the Green-function weight of
the matching cycle are both exponential integrals in 4 pi |alpha| y.  All
constants are pinned by the ordinary differential equation these functions
satisfy in the Iwasawa coordinate and by quadrature against the defining
integrals (exercised in the tests).
"""

from __future__ import annotations

import math

_EULER_GAMMA = 0.5772156649015328606065120900824024310421593359399

_SERIES_CUTOFF = 1.0
_TOL = 1e-16


def exp_integral_e1(x):
    """The exponential integral E1(x) = int_x^inf e^-t dt/t for x > 0.

    Power series below the cutoff, modified-Lentz continued fraction above;
    relative error well under 1e-12 across the range used here.
    """
    if not x > 0:
        raise ValueError(f"E1 requires a positive argument, got {x}")
    if x <= _SERIES_CUTOFF:
        # E1(x) = -gamma - ln x + sum_{n>=1} (-1)^(n+1) x^n / (n n!)
        acc = -_EULER_GAMMA - math.log(x)
        term = 1.0
        for n in range(1, 64):
            term *= -x / n
            delta = -term / n
            acc += delta
            if abs(delta) < _TOL * max(abs(acc), 1e-300):
                return acc
        raise ArithmeticError("E1 series failed to converge")
    # E1(x) = e^-x / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 200):
        a = -(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h * math.exp(-x)
    raise ArithmeticError("E1 continued fraction failed to converge")


def arch_central_value(alpha):
    """Normalized central value on the positive-definite line: 1 for targets
    it represents, 0 otherwise."""
    if alpha == 0:
        raise ValueError("nonzero target required")
    return 1 if alpha > 0 else 0


def arch_whittaker_minus(alpha, y):
    """Central value on the negative-definite line at a negative target:
    (1/4) e^{4 pi alpha y} (exponentially small, never zero)."""
    alpha, y = float(alpha), float(y)
    assert alpha < 0 and y > 0
    return 0.25 * math.exp(4.0 * math.pi * alpha * y)


def arch_central_derivative(alpha, y):
    """Derivative of the central value on the positive-definite line at a
    negative target: -(1/4) E1(4 pi |alpha| y).  Its y-derivative reproduces
    arch_whittaker_minus / y, which pins the constant."""
    alpha, y = float(alpha), float(y)
    assert alpha < 0 and y > 0
    return -0.25 * exp_integral_e1(4.0 * math.pi * abs(alpha) * y)


def arch_green_factor(alpha, y):
    """Green-function weight of an archimedean special-cycle point against a
    negative target: (1/2) E1(4 pi |alpha| y)."""
    alpha, y = float(alpha), float(y)
    assert alpha < 0 and y > 0
    return 0.5 * exp_integral_e1(4.0 * math.pi * abs(alpha) * y)
