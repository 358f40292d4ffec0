"""Arithmetic degrees of special cycles on the moduli of CM elliptic curves
with extra Hermitian structure.

The cycle attached to a nonzero target is supported where the target is
missed at exactly one place.  At a finite place the points are the lattice
vectors of the coherent neighbor family with the prescribed length; each
contributes the length of its deformation space, read off from how deep the
vector sits inside the prime above p (its divisibility order), times
log N(P) = f log p, weighted by one over the unit group order.  At the
archimedean place no finite points exist and the whole degree is the
Green-function weight against the negative-definite neighbor's vectors.

The assembly step (multiplicities in, degree out) is split from the point
enumeration so synthetic instances with planted multiplicities can exercise
it directly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .archwhittaker import arch_green_factor
from .field import INF, LogLinear, class_group, unit_count
from .hermitian import Collection, Lattice, coherent_neighbor

_DEPTH_LIMIT = 64


def divisibility_depth(vector, lattice, prime):
    """1 + (number of times prime divides the vector inside the lattice):
    the membership loop runs until P^m * (lattice ideal) no longer contains
    the vector."""
    x, y = vector
    assert x != 0 or y != 0
    depth = 0
    current = lattice.ideal
    while current.contains(vector):
        depth += 1
        current = prime.mul(current)
        assert depth < _DEPTH_LIMIT
    assert depth >= 1, "vector not in its own lattice"
    return depth


def _vector_elements(lattice, alpha):
    """Lattice vectors of length alpha as field elements (coordinate pairs
    in the (1, sqrt D)/2-basis)."""
    g1, g2 = lattice.ideal.gens()
    out = []
    for cx, cy in lattice.vectors(alpha):
        out.append((g1[0] * cx + g2[0] * cy, g1[1] * cx + g2[1] * cy))
    return out


def assemble_finite_degree(depths, f, w, p):
    """Arithmetic degree of a finite-place cycle from its list of point
    multiplicities: (f/w) sum(depths) * log p."""
    coeff = Fraction(f, w) * sum(Fraction(d) for d in depths)
    return LogLinear(0, {p: coeff})


def assemble_arch_degree(rep_count, w, alpha, y):
    """Archimedean degree from a total representation count: each of the
    rep_count vectors carries the Green weight, divided by unit orbits."""
    return LogLinear(0, {}, Fraction(rep_count, w) * arch_green_factor(alpha, y))


@lru_cache(maxsize=None)
def _neighbor(D, xi, place):
    return coherent_neighbor(D, xi, place)


@lru_cache(maxsize=None)
def _class_group(D):
    return class_group(D)


def cycle_points(D, xi, alpha):
    """The finite-place cycle as explicit data: (p, f, list of (class index,
    vector, depth)).  Requires the target to be missed exactly at one finite
    place."""
    coll = Collection(D, xi)
    diff = coll.diff_set(alpha)
    assert len(diff) == 1 and diff[0] != INF
    p = diff[0]
    neighbor = _neighbor(D, Fraction(xi), p)
    points = []
    for idx, lattice in enumerate(neighbor.family(_class_group(D))):
        for vec in _vector_elements(lattice, alpha):
            points.append((idx, vec, divisibility_depth(vec, lattice, neighbor.prime)))
    return p, neighbor.f, points


def arithmetic_degree(D, xi, alpha, y=1):
    """Degree of the compactified special cycle at a nonzero target, as a
    LogLinear: rational log p coefficients from finite places, a float
    residual from the archimedean Green function, exactly zero when the
    target is missed at two or more places."""
    xi = Fraction(xi)
    alpha = Fraction(alpha)
    assert alpha != 0
    coll = Collection(D, xi)
    diff = coll.diff_set(alpha)
    assert diff, "incoherent collections miss every target somewhere"
    if len(diff) >= 2:
        return LogLinear(0)
    w = unit_count(D) // 2
    place = diff[0]
    if place == INF:
        neighbor = _neighbor(D, xi, INF)
        reps = sum(
            L.rep_number(alpha) for L in neighbor.family(_class_group(D))
        )
        return assemble_arch_degree(reps, w, alpha, y)
    p, f, points = cycle_points(D, xi, alpha)
    return assemble_finite_degree([d for (_, _, d) in points], f, w, p)
