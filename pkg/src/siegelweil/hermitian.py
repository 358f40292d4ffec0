"""Rank-one Hermitian spaces over imaginary quadratic fields.

A local space at a place v of Q is (E_v, Q) with Q(x) = s * N(x) for a scale
class s in Q_v^x / N(E_v^x); everything about it is decided by Hilbert
symbols.  A collection fixes one local space per place with almost all of
them unflipped; the incoherent ones (local invariants multiplying to -1) are
the input to the verification, and their coherent neighbors (flip one
non-split place back) carry the lattice families whose point counts form the
geometric side.

Lattices are pairs (fractional ideal, rational scale) with the quadratic form
Q(x) = scale * N(x) / N(ideal); their norm forms are classical binary
quadratic forms, so representation numbers are exact small searches.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .field import (
    INF,
    Ideal,
    binary_form_count,
    form_to_ideal,
    hilbert_symbol,
    is_fundamental_discriminant,
    legendre,
    prime_divisors,
    reduce_form,
    splitting_type,
    unit_mod,
    unit_part,
    val,
)


def _support_primes(*rationals):
    out = set()
    for x in rationals:
        x = Fraction(x)
        out.update(prime_divisors(x.numerator))
        out.update(prime_divisors(x.denominator))
    return out


def nonnorm_rep(D, p):
    """A canonical non-norm of E_p/Q_p at a non-split finite p: the inert
    places use the uniformizer p, the ramified ones the smallest positive
    unit that fails to be a norm."""
    st = splitting_type(D, p)
    assert st != "split", "split places have no non-norms"
    if st == "inert":
        return Fraction(p)
    u = 1
    while True:
        u += 1
        if u % p and hilbert_symbol(u, D, p) == -1:
            return Fraction(u)


class LocalSpace:
    """One local Hermitian line (E_v, s*N).  The scale is kept as a normalized
    class representative: 1 or the canonical non-norm at finite places, +-1
    at the archimedean place (sign = definiteness)."""

    __slots__ = ("D", "v", "scale")

    def __init__(self, D, v, scale):
        assert is_fundamental_discriminant(D)
        scale = Fraction(scale)
        assert scale != 0
        self.D, self.v = D, v
        if v == INF:
            self.scale = Fraction(1 if scale > 0 else -1)
        elif splitting_type(D, v) == "split":
            self.scale = Fraction(1)
        else:
            self.scale = Fraction(1) if hilbert_symbol(scale, D, v) == 1 else nonnorm_rep(D, v)

    def inv(self):
        """Local invariant (-scale, D)_v.  At the real place this is -1 for the
        positive-definite line and +1 for the negative-definite one."""
        return hilbert_symbol(-self.scale, self.D, self.v)

    def represents(self, alpha):
        alpha = Fraction(alpha)
        assert alpha != 0
        if self.v == INF:
            return (alpha > 0) == (self.scale > 0)
        if splitting_type(self.D, self.v) == "split":
            return True
        return hilbert_symbol(alpha * self.scale, self.D, self.v) == 1

    def __repr__(self):
        return f"LocalSpace(D={self.D}, v={self.v}, scale={self.scale})"


class Collection:
    """A collection of local Hermitian lines: scale xi at every finite place,
    flipped (multiplied by a non-norm) at the places in `flips`, and with the
    archimedean line positive definite unless arch_neg is set.

    The default Collection(D, xi) with xi < 0 is incoherent: the finite data
    belongs to the global space (E, xi*N) but the archimedean line does not.
    """

    __slots__ = ("D", "xi", "flips", "arch_neg")

    def __init__(self, D, xi, flips=(), arch_neg=False):
        assert is_fundamental_discriminant(D)
        self.D = D
        self.xi = Fraction(xi)
        assert self.xi != 0
        flips = frozenset(flips)
        for p in flips:
            assert p != INF and splitting_type(D, p) != "split", f"cannot flip {p}"
        self.flips = flips
        self.arch_neg = bool(arch_neg)

    def local_space(self, v):
        if v == INF:
            return LocalSpace(self.D, INF, -1 if self.arch_neg else 1)
        s = self.xi
        if v in self.flips:
            s *= nonnorm_rep(self.D, v)
        return LocalSpace(self.D, v, s)

    def inv_at(self, v):
        return self.local_space(v).inv()

    def support(self):
        """Places where the local invariant can differ from +1."""
        ps = _support_primes(2 * self.D, self.xi) | set(self.flips)
        return sorted(ps) + [INF]

    def invariant_product(self):
        prod = 1
        for v in self.support():
            prod *= self.inv_at(v)
        return prod

    def is_coherent(self):
        return self.invariant_product() == 1

    def represents_at(self, v, alpha):
        return self.local_space(v).represents(alpha)

    def diff_set(self, alpha):
        """Places where alpha is not represented locally: finite primes in
        ascending order, INF last when present.  Nonempty exactly when the
        adelic product misses alpha somewhere; for incoherent collections it
        always has odd size."""
        alpha = Fraction(alpha)
        assert alpha != 0
        cand = _support_primes(2 * self.D, self.xi, alpha) | set(self.flips)
        out = [p for p in sorted(cand) if not self.represents_at(p, alpha)]
        if not self.represents_at(INF, alpha):
            out.append(INF)
        return out

    def flipped(self, p):
        """The collection with the local line at p replaced by its other class."""
        flips = set(self.flips)
        if p == INF:
            return Collection(self.D, self.xi, flips, not self.arch_neg)
        if p in flips:
            flips.remove(p)
        else:
            flips.add(p)
        return Collection(self.D, self.xi, flips, self.arch_neg)

    def __repr__(self):
        return (
            f"Collection(D={self.D}, xi={self.xi}, flips={sorted(self.flips)}, "
            f"arch={'(0,1)' if self.arch_neg else '(1,0)'})"
        )


# ---------------------------------------------------------------------------
# lattices


class Lattice:
    """(ideal, scale): the rank-one Hermitian lattice with quadratic form
    Q(x) = scale * N(x) / N(ideal) on the fractional ideal."""

    __slots__ = ("D", "ideal", "scale")

    def __init__(self, D, ideal, scale):
        assert isinstance(ideal, Ideal) and ideal.D == D
        self.D = D
        self.ideal = ideal
        self.scale = Fraction(scale)
        assert self.scale != 0

    @classmethod
    def standard(cls, D, scale):
        return cls(D, Ideal.maximal_order(D), scale)

    def norm_form(self):
        """Rational binary form (A, B, C) of Q on the HNF basis of the ideal.
        The q-part of the ideal cancels: (A, B, C) = scale*(a, b, (b^2-D)/4a)."""
        a, b = self.ideal.a, self.ideal.b
        c = (b * b - self.D) // (4 * a)
        s = self.scale
        return (s * a, s * b, s * c)

    def disc(self):
        A, B, C = self.norm_form()
        return B * B - 4 * A * C  # always scale^2 * D

    def is_positive_definite(self):
        return self.scale > 0

    def integer_form(self):
        """(m, (a, b, c)): the norm form as m * primitive-integer-multiple,
        i.e. norm_form == m*(a, b, c) with integer (a, b, c), a > 0."""
        A, B, C = self.norm_form()
        den = A.denominator
        for x in (B, C):
            den = den * x.denominator // math.gcd(den, x.denominator)
        ai, bi, ci = int(A * den), int(B * den), int(C * den)
        g = math.gcd(math.gcd(ai, bi), ci)
        sign = 1 if ai > 0 else -1
        return Fraction(sign * g, den), (sign * ai // g, sign * bi // g, sign * ci // g)

    def isometry_key(self):
        m, f = self.integer_form()
        return (m, reduce_form(f))

    def vectors(self, alpha):
        """All (x, y) in Z^2 with Q(x*g1 + y*g2) == alpha (alpha != 0)."""
        alpha = Fraction(alpha)
        assert alpha != 0
        m, (a, b, c) = self.integer_form()
        t = alpha / m
        if t.denominator != 1 or t <= 0:
            return []
        t = int(t)
        disc = b * b - 4 * a * c
        out = []
        ylim = math.isqrt(4 * a * t // abs(disc))
        for y in range(-ylim, ylim + 1):
            d = 4 * a * t + disc * y * y
            if d < 0:
                continue
            r = math.isqrt(d)
            if r * r != d:
                continue
            for pm in ((r,) if r == 0 else (r, -r)):
                num = -b * y + pm
                if num % (2 * a) == 0:
                    out.append((num // (2 * a), y))
        return out

    def rep_number(self, alpha):
        if Fraction(alpha) == 0:
            return 1
        return len(self.vectors(alpha))

    def twist(self, f_or_ideal):
        """Twist by a class group element (reduced form) or by an ideal:
        multiply the ideal, keep the scale.  Base-point twists permute the
        isometry classes of the genus family."""
        if isinstance(f_or_ideal, Ideal):
            b_ideal = f_or_ideal
        else:
            b_ideal = form_to_ideal(self.D, f_or_ideal)
        return Lattice(self.D, b_ideal.mul(self.ideal), self.scale)

    def __repr__(self):
        return f"Lattice(D={self.D}, ideal={self.ideal!r}, scale={self.scale})"


# ---------------------------------------------------------------------------
# local lattice classification
#
# Needed to certify coherent-neighbor presentations: a candidate global
# lattice must be everywhere locally isometric to the prescribed data.  For
# odd p a binary form over Z_p diagonalises and the Jordan data is a complete
# invariant; at p = 2 we fingerprint by congruence solution counts of a probe
# set of targets 2^v * u at levels deep enough to be stable, which separates
# the binary 2-adic classes that occur here (isometric lattices must agree on
# every such count).


def _min_val3(A, B, C, p):
    vals = [val(x, p) for x in (A, C, A + B + C) if x != 0]
    assert vals, "degenerate form"
    return min(vals)


def local_class_key(form, p):
    A, B, C = (Fraction(t) for t in form)
    disc = B * B - 4 * A * C
    assert disc != 0
    if p != 2:
        m = _min_val3(A, B, C, p)
        # rotate a minimal-valuation value into the (1,0) slot
        if A == 0 or val(A, p) > m:
            if C != 0 and val(C, p) == m:
                A, C = C, A
            else:
                A, B = A + B + C, B + 2 * C
        assert val(A, p) == m
        # complete the square: diag(A, -disc/(4A))
        d2 = -disc / (4 * A)
        e1, e2 = val(A, p), val(d2, p)
        l1, l2 = legendre(unit_part(A, p), p), legendre(unit_part(d2, p), p)
        if e1 > e2:
            e1, e2, l1, l2 = e2, e1, l2, l1
        if e1 == e2:
            return ("odd", e1, e2, l1 * l2)
        return ("odd", e1, e2, l1, l2)
    # p = 2: congruence-count fingerprint of the content-stripped form
    m = _min_val3(A, B, C, 2)
    A, B, C = A / 2**m, B / 2**m, C / 2**m
    disc = B * B - 4 * A * C
    vd = val(disc, 2)
    probes = []
    for v in range(vd + 3):
        k = v + vd + 4
        for u in (1, 3, 5, 7):
            probes.append(binary_form_count((A, B, C), 2**v * u, 2, k))
    return ("even", m, vd, unit_mod(unit_part(disc, 2), 2, 3), tuple(probes))


# ---------------------------------------------------------------------------
# coherent neighbors


class CoherentNeighbor:
    """The coherent collection obtained from an incoherent one by flipping a
    single place v, realized by an actual global lattice presentation.

    base_lattice is a positive-definite (ideal, scale) pair whose local data
    agrees with the incoherent collection at every finite place except v; its
    class-group twists enumerate the isometry classes of the family whose
    weighted representation numbers form the geometric side.  At a finite
    flip place the member lattices all contain their dual with the same
    elementary divisor, and flip_local_model carries an integral model of the
    flipped local lattice used for the local derivative there.

    For the archimedean flip the global space is negative definite and no
    point counting happens; base_lattice is the (negative) reference scale.
    """

    __slots__ = (
        "D",
        "xi",
        "flip_place",
        "base_lattice",
        "prime",
        "f",
        "norm_unif",
        "flip_local_model",
    )

    def __init__(self, D, xi, flip_place, base_lattice, prime, f, norm_unif, flip_local_model):
        self.D = D
        self.xi = Fraction(xi)
        self.flip_place = flip_place
        self.base_lattice = base_lattice
        self.prime = prime
        self.f = f
        self.norm_unif = norm_unif
        self.flip_local_model = flip_local_model

    def family(self, cg):
        """Representative lattices of the genus family, one per ideal class."""
        return [self.base_lattice.twist(form) for form in cg.forms]

    def __repr__(self):
        return (
            f"CoherentNeighbor(D={self.D}, xi={self.xi}, flip={self.flip_place}, "
            f"lattice={self.base_lattice!r})"
        )


def _norm_uniformizer(D, p):
    """The smallest rational (by |.|, positive first) generating the norm
    group value N(pi_E) at a non-split p: p^2 at inert places, p*u with the
    right unit class at ramified ones."""
    if splitting_type(D, p) == "inert":
        return Fraction(p * p)
    m = 0
    while True:
        m += 1
        for u in (m, -m):
            if u % p == 0:
                continue
            if hilbert_symbol(p * u, D, p) == 1:
                return Fraction(p * u)


@lru_cache(maxsize=None)
def coherent_neighbor(D, xi, flip_place, max_scale=128, max_ideal_norm=64):
    """Find a global presentation of the coherent collection next to the
    incoherent Collection(D, xi) across the place flip_place.

    The returned base lattice is certified by local isometry at every place:
    exact Jordan/count fingerprints against the unflipped (O, xi) data away
    from the flip, and against the once-scaled model at the flip itself.
    """
    base = Collection(D, xi)
    assert not base.is_coherent(), "base collection must be incoherent"
    flipped = base.flipped(flip_place)
    assert flipped.is_coherent()

    if flip_place == INF:
        assert xi < 0, "archimedean flip needs a negative scale"
        lat = Lattice.standard(D, xi)
        return CoherentNeighbor(D, xi, INF, lat, None, None, None, None)

    p = flip_place
    st = splitting_type(D, p)
    assert st in ("inert", "ramified")
    f = 2 if st == "inert" else 1
    prime = Ideal.prime_above(D, p)
    if st == "inert":
        flip_model = Lattice.standard(D, Fraction(xi) * p)
    else:
        flip_model = Lattice.standard(D, Fraction(xi) * nonnorm_rep(D, p))

    base_form = Lattice.standard(D, xi).norm_form()
    flip_form = flip_model.norm_form()
    key_cache = {}

    def target_key(q):
        if q not in key_cache:
            model = flip_form if q == p else base_form
            key_cache[q] = local_class_key(model, q)
        return key_cache[q]

    xi = Fraction(xi)
    scales = []
    for mm in range(1, max_scale + 1):
        for s in (mm * abs(xi), Fraction(mm)):
            if s not in scales:
                scales.append(s)
    scales.sort()

    ideals = [Ideal.maximal_order(D)]
    for a in range(1, max_ideal_norm + 1):
        for b in range(2 * a):
            if (b * b - D) % (4 * a) == 0 and (a, b) != (1, D % 2):
                ideals.append(Ideal(D, 1, a, b))

    for s in scales:
        for ideal in ideals:
            cand = Lattice(D, ideal, s)
            if not cand.is_positive_definite():
                continue
            ratio = s * ideal.norm * xi
            checks = _support_primes(2 * D, xi, s, ideal.norm) | {p}
            if any(hilbert_symbol(ratio, D, q) != (-1 if q == p else 1) for q in sorted(checks)):
                continue
            cf = cand.norm_form()
            if all(local_class_key(cf, q) == target_key(q) for q in sorted(checks)):
                return CoherentNeighbor(
                    D, xi, p, cand, prime, f, _norm_uniformizer(D, p), flip_model
                )
    raise ValueError(
        f"no coherent neighbor presentation found for D={D}, xi={xi}, flip={flip_place}"
    )
