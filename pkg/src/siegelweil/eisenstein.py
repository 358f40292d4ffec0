"""Fourier coefficients of the incoherent weight-one Eisenstein series at the
center, assembled as products of the local data.

The central value attached to a collection is (up to a global constant) the
product of local central values; for incoherent collections at least one
factor vanishes, so every central coefficient is exactly zero.  The central
derivative keeps a single derived factor at the unique bad place of the
target and honest central values elsewhere, with the derivative's log p kept
symbolic.

Normalization is pinned by measurement, not assumption: the Siegel-Weil
constant kappa_sw is calibrated once per discriminant on the smallest target
the coherent genus family represents, and the derivative constant follows
from it through the stack mass.  Every other target then furnishes an
independent exact identity, which is what the verification suite checks.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .archwhittaker import arch_central_derivative, arch_central_value
from .field import INF, LogLinear, class_group, hilbert_symbol, prime_divisors, ramified_primes, unit_count
from .hermitian import Collection, Lattice, coherent_neighbor
from .localwhittaker import central_derivative, central_value


def stack_mass(D):
    """h(D) / (#units/2): the weighted point count of the moduli stack."""
    return Fraction(class_group(D).h * 2, unit_count(D))


def distinguished_flip_prime(D):
    """The ramified prime at which -1 fails to be a local norm.  Flipping
    the sign incoherence there yields the positive-definite genus family."""
    cand = [p for p in ramified_primes(D) if hilbert_symbol(-1, D, p) == -1]
    assert len(cand) == 1, f"expected a unique distinguished ramified prime for {D}"
    return cand[0]


@lru_cache(maxsize=None)
def _sw_neighbor(D, xi):
    return coherent_neighbor(D, xi, distinguished_flip_prime(D))


@lru_cache(maxsize=None)
def _family(D, xi):
    return tuple(_sw_neighbor(D, xi).family(class_group(D)))


def _weight_denominator(D):
    return unit_count(D) // 2


def averaged_central_value(D, alpha, p, xi=-1):
    """Central value at p averaged over the genus family of the coherent
    neighbor at the distinguished prime."""
    fam = _family(D, Fraction(xi))
    total = sum(central_value(D, L.norm_form(), alpha, p) for L in fam)
    return total / len(fam)


def _support(D, alpha, extra=()):
    ps = set(prime_divisors(2 * abs(D)))
    alpha = Fraction(alpha)
    ps |= set(prime_divisors(alpha.numerator)) | set(prime_divisors(alpha.denominator))
    for x in extra:
        x = Fraction(x)
        ps |= set(prime_divisors(x.numerator)) | set(prime_divisors(x.denominator))
    return sorted(ps)


def calibration_point(D, xi=-1, calibration_alpha=None):
    """The target the normalization is measured on, as a triple
    (alpha0, family count, density product), both sides nonzero.

    Without an override this is the smallest positive target the genus
    family represents with a nonvanishing density product; with one, that
    target is tried alone and failure raises ArithmeticError.
    """
    xi = Fraction(xi)
    targets = [calibration_alpha] if calibration_alpha is not None else range(1, 200)
    w = _weight_denominator(D)
    for alpha in targets:
        alpha = Fraction(alpha)
        lhs = Fraction(sum(L.rep_number(alpha) for L in _family(D, xi)), w)
        if lhs == 0:
            continue
        prod = Fraction(1)
        for p in _support(D, alpha, extra=(xi,)):
            prod *= averaged_central_value(D, alpha, p, xi)
        if prod == 0:
            continue
        return alpha, lhs, prod
    raise ArithmeticError(f"no calibration target found for D={D}")


@lru_cache(maxsize=None)
def kappa_sw(D, xi=-1, calibration_alpha=None):
    """The Siegel-Weil proportionality constant, measured on one target.

    With lhs the unit-weighted family representation count and the right
    side (1/2) kappa prod_p acv_p, the constant is fixed by the smallest
    positive target with nonvanishing sides (or by calibration_alpha).  Its
    measured value is 2^(number of ramified primes); the code keeps the
    measurement.
    """
    _, lhs, prod = calibration_point(D, xi, calibration_alpha)
    return 2 * lhs / prod


def siegel_weil_check(D, alpha, xi=-1, calibration_alpha=None):
    """Both sides of the coherent-value identity at one target: the family's
    unit-weighted representation count against (1/2) kappa_sw times the
    product of averaged local central values.  Exact rationals."""
    xi = Fraction(xi)
    alpha = Fraction(alpha)
    assert alpha > 0
    w = _weight_denominator(D)
    lhs = Fraction(sum(L.rep_number(alpha) for L in _family(D, xi)), w)
    rhs = Fraction(1, 2) * kappa_sw(D, xi, calibration_alpha)
    for p in _support(D, alpha, extra=(xi,)):
        rhs *= averaged_central_value(D, alpha, p, xi)
    return lhs, rhs


def kappa_derivative(D, xi=-1, calibration_alpha=None):
    """Constant in front of the central-derivative coefficient, pinned by the
    measured Siegel-Weil constant through the stack mass."""
    return 4 / (stack_mass(D) * kappa_sw(D, xi, calibration_alpha))


def central_value_coefficient(D, xi, alpha, calibration_alpha=None):
    """Central (value, not derivative) coefficient at a nonzero target: the
    full product of local central values over the collection's support.
    Exactly rational; identically zero for incoherent collections since some
    local factor is zero."""
    xi = Fraction(xi)
    alpha = Fraction(alpha)
    assert alpha != 0
    base_form = Lattice.standard(D, xi).norm_form()
    prod = Fraction(kappa_derivative(D, xi, calibration_alpha)) * arch_central_value(alpha)
    for p in _support(D, alpha, extra=(xi,)):
        if prod == 0:
            break
        prod *= central_value(D, base_form, alpha, p)
    return prod


def derivative_coefficient(D, xi, alpha, y=1, calibration_alpha=None):
    """Central-derivative Fourier coefficient of the incoherent series at a
    nonzero target, for the imaginary part y of the modular variable.

    Exactly one local factor is differentiated, so the coefficient vanishes
    outright when two or more places fail to represent the target; with one
    finite bad place the answer is an exact rational multiple of log p; with
    the archimedean place bad it is a float (an exponential integral) stored
    in the residual slot of the returned LogLinear.
    """
    xi = Fraction(xi)
    alpha = Fraction(alpha)
    assert alpha != 0
    coll = Collection(D, xi)
    diff = coll.diff_set(alpha)
    assert diff, "incoherent collections miss every target somewhere"
    if len(diff) >= 2:
        return LogLinear(0)
    kappa = kappa_derivative(D, xi, calibration_alpha)
    base_form = Lattice.standard(D, xi).norm_form()
    place = diff[0]
    if place == INF:
        value = float(kappa) * arch_central_derivative(alpha, y)
        for p in _support(D, alpha, extra=(xi,)):
            value *= float(central_value(D, base_form, alpha, p))
        return LogLinear(0, {}, value)
    neighbor = coherent_neighbor(D, xi, place)
    scale = Fraction(kappa)
    for p in _support(D, alpha, extra=(xi,)):
        if p == place:
            continue
        scale *= central_value(D, base_form, alpha, p)
    return central_derivative(neighbor, alpha).scaled(scale)
