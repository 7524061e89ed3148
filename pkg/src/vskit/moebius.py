"""Moebius and extended Moebius transformations of the Riemann sphere.

Matrices are normalized to determinant one and compared projectively,
i.e. up to a global sign.  An anticonformal map with matrix M acts as
z -> (a*conj(z) + b) / (c*conj(z) + d).
"""

import cmath
from dataclasses import dataclass
from fractions import Fraction

TOL = 1e-9                # default tolerance for projective comparisons
PARABOLIC_BAND = 1e-12    # |tr^2 - 4| below this is treated as honestly parabolic
MAX_ELLIPTIC_ORDER = 120  # search bound for elliptic orders


class _Infinity:
    """Singleton for the point at infinity."""

    __slots__ = ()

    def __repr__(self):
        return "inf"


INF = _Infinity()


def _exact_det(a, b, c, d):
    """Determinant of a float-entry complex matrix, free of cancellation.

    For products of large normalized matrices, a*d and b*c agree to many
    digits and the float difference is mostly rounding noise; rational
    arithmetic on the exact float values recovers the true determinant.
    """
    ar, ai = Fraction(a.real), Fraction(a.imag)
    br, bi = Fraction(b.real), Fraction(b.imag)
    cr, ci = Fraction(c.real), Fraction(c.imag)
    dr, di = Fraction(d.real), Fraction(d.imag)
    re = (ar * dr - ai * di) - (br * cr - bi * ci)
    im = (ar * di + ai * dr) - (br * ci + bi * cr)
    return complex(re, im)


def sphere_point(value):
    """Canonicalize a point of the sphere: a finite complex number or INF.

    Float infinities collapse to the single canonical INF; NaN is rejected.
    """
    if value is INF:
        return INF
    z = complex(value)
    if cmath.isnan(z):
        raise ValueError("point of the sphere cannot be NaN")
    if cmath.isinf(z):
        return INF
    return z


def chordal(p, q):
    """Chordal distance between two sphere points (unit sphere, diameter 2)."""
    p = sphere_point(p)
    q = sphere_point(q)
    if p is INF and q is INF:
        return 0.0
    if p is INF:
        return 2.0 / (1.0 + abs(q) ** 2) ** 0.5
    if q is INF:
        return 2.0 / (1.0 + abs(p) ** 2) ** 0.5
    return 2.0 * abs(p - q) / ((1.0 + abs(p) ** 2) * (1.0 + abs(q) ** 2)) ** 0.5


class MoebiusMap:
    """A (possibly orientation-reversing) Moebius transformation.

    Stored as a 2x2 complex matrix with determinant 1 plus an orientation
    flag.  Two maps are the same transformation exactly when their flags
    agree and their matrices agree up to sign.
    """

    __slots__ = ("a", "b", "c", "d", "conformal")

    def __init__(self, a, b, c, d, conformal=True):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if scale > 0.0 and abs(det) < 1e-9 * scale * scale:
            det = _exact_det(a, b, c, d)
        if abs(det) < 1e-30:
            raise ValueError("matrix is singular")
        s = cmath.sqrt(det)
        self.a = a / s
        self.b = b / s
        self.c = c / s
        self.d = d / s
        self.conformal = bool(conformal)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __call__(self, p):
        p = sphere_point(p)
        if not self.conformal and p is not INF:
            p = p.conjugate()
        if p is INF:
            if self.c == 0:
                return INF
            return sphere_point(self.a / self.c)
        den = self.c * p + self.d
        if den == 0:
            return INF
        return sphere_point((self.a * p + self.b) / den)

    def __mul__(self, other):
        """Composition: (self * other)(z) = self(other(z))."""
        a2, b2, c2, d2 = other.entries
        if not self.conformal:
            a2, b2, c2, d2 = (a2.conjugate(), b2.conjugate(),
                              c2.conjugate(), d2.conjugate())
        return MoebiusMap(
            self.a * a2 + self.b * c2,
            self.a * b2 + self.b * d2,
            self.c * a2 + self.d * c2,
            self.c * b2 + self.d * d2,
            conformal=(self.conformal == other.conformal),
        )

    def inverse(self):
        if self.conformal:
            return MoebiusMap(self.d, -self.b, -self.c, self.a)
        return MoebiusMap(self.d.conjugate(), -self.b.conjugate(),
                          -self.c.conjugate(), self.a.conjugate(),
                          conformal=False)

    def conjugated_by(self, t):
        """Return t * self * t^-1."""
        return t * self * t.inverse()

    def trace(self):
        return self.a + self.d

    def __pow__(self, k):
        if k == 0:
            return MoebiusMap.identity()
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def __repr__(self):
        tag = "" if self.conformal else ", anticonformal"
        return (f"MoebiusMap({self.a:.6g}, {self.b:.6g}, "
                f"{self.c:.6g}, {self.d:.6g}{tag})")


def compose(m1, m2):
    """Composition m1 after m2."""
    return m1 * m2


def apply(m, p):
    return m(p)


def _projective_gap(m1, m2):
    e1 = m1.entries
    e2 = m2.entries
    diff = max(abs(x - y) for x, y in zip(e1, e2))
    summ = max(abs(x + y) for x, y in zip(e1, e2))
    return min(diff, summ)


def projectively_equal(m1, m2, tol=TOL):
    """Whether two maps agree as transformations (matrices equal up to sign)."""
    if m1.conformal != m2.conformal:
        return False
    return _projective_gap(m1, m2) <= tol


def is_identity_map(m, tol=TOL):
    return m.conformal and _projective_gap(m, MoebiusMap.identity()) <= tol


@dataclass(frozen=True)
class MapClass:
    """Classification outcome of a Moebius map.

    kind is one of: identity, elliptic, parabolic, ambiguous-parabolic,
    loxodromic for conformal maps; reflection, imaginary-reflection,
    pseudo-hyperbolic, anticonformal-elliptic, pseudo-parabolic for
    anticonformal ones.  order is set for finite-order elliptics (None
    when no order <= the search bound exists), multiplier for loxodromic,
    elliptic and pseudo-hyperbolic maps.
    """

    kind: str
    order: int | None = None
    multiplier: complex | None = None


def _elliptic_order(m, tol, max_order):
    power = m
    for k in range(2, max_order + 1):
        power = power * m
        if is_identity_map(power, tol):
            return k
    return None


def classify(m, tol=TOL, max_order=MAX_ELLIPTIC_ORDER):
    """Classify a map by its squared trace.

    Squared traces within PARABOLIC_BAND of 4 are called parabolic; the
    wider band up to tol is reported as ambiguous-parabolic instead of
    silently picking a class.
    """
    if not m.conformal:
        return _classify_anticonformal(m, tol, max_order)
    if is_identity_map(m, tol):
        return MapClass("identity")
    t = m.trace()
    t2 = t * t
    dev = abs(t2 - 4.0)
    if dev <= PARABOLIC_BAND:
        return MapClass("parabolic")
    if dev < tol:
        return MapClass("ambiguous-parabolic")
    if abs(t2.imag) <= tol and -tol < t2.real < 4.0:
        k = (t + cmath.sqrt(t2 - 4.0)) / 2.0
        lam = k * k
        if lam.imag < 0:
            lam = 1.0 / lam
        order = _elliptic_order(m, tol, max_order)
        return MapClass("elliptic", order=order, multiplier=lam)
    k1 = (t + cmath.sqrt(t2 - 4.0)) / 2.0
    k2 = (t - cmath.sqrt(t2 - 4.0)) / 2.0
    k = k1 if abs(k1) >= abs(k2) else k2
    lam = k * k
    if abs(lam) <= 1.0:
        lam = 1.0 / lam
    return MapClass("loxodromic", multiplier=lam)


def _classify_anticonformal(m, tol, max_order):
    square = m * m
    if is_identity_map(square, tol):
        # the sign of M * conj(M) distinguishes the two involutions:
        # +I has a circle of fixed points, -I has none
        ident = MoebiusMap.identity().entries
        gap_direct = max(abs(x - y) for x, y in zip(square.entries, ident))
        if gap_direct <= tol:
            return MapClass("reflection")
        return MapClass("imaginary-reflection")
    inner = classify(square, tol, max_order)
    if inner.kind == "loxodromic":
        lam = cmath.sqrt(inner.multiplier)
        if abs(lam) <= 1.0:
            lam = 1.0 / lam
        return MapClass("pseudo-hyperbolic", multiplier=lam)
    if inner.kind == "elliptic":
        order = 2 * inner.order if inner.order is not None else None
        return MapClass("anticonformal-elliptic", order=order,
                        multiplier=inner.multiplier)
    if inner.kind == "parabolic":
        return MapClass("pseudo-parabolic")
    return MapClass("ambiguous-parabolic")


def fixed_points(m, tol=TOL):
    """Fixed points of a conformal non-identity map, one or two sphere points.

    Points are returned sorted with INF first, finite points by
    (real, imag); a parabolic map yields a single point.
    """
    if not m.conformal:
        raise ValueError("fixed points only computed for conformal maps")
    if is_identity_map(m, tol):
        raise ValueError("identity fixes everything")
    a, b, c, d = m.entries
    if abs(c) <= 1e-14:
        if abs(a - d) <= 1e-14:
            return (INF,)
        return _sort_points((INF, b / (d - a)))
    disc = (a - d) ** 2 + 4.0 * b * c
    if abs(disc) <= PARABOLIC_BAND:
        return (sphere_point((a - d) / (2.0 * c)),)
    root = cmath.sqrt(disc)
    p1 = (a - d + root) / (2.0 * c)
    p2 = (a - d - root) / (2.0 * c)
    return _sort_points((p1, p2))


def _sort_points(points):
    finite = sorted((p for p in points if p is not INF),
                    key=lambda z: (z.real, z.imag))
    if any(p is INF for p in points):
        return (INF, *finite)
    return tuple(finite)


def attracting_fixed_point(m, tol=TOL):
    """The attracting fixed point of a loxodromic map."""
    cls = classify(m, tol)
    if cls.kind != "loxodromic":
        raise ValueError(f"map is {cls.kind}, not loxodromic")
    a, b, c, d = m.entries
    t = a + d
    root = cmath.sqrt(t * t - 4.0)
    k1 = (t + root) / 2.0
    k2 = (t - root) / 2.0
    k = k1 if abs(k1) > abs(k2) else k2
    # eigenvector (b, k - a) or (k - d, c); pick the better-conditioned one
    v1, w1 = b, k - a
    v2, w2 = k - d, c
    if max(abs(v1), abs(w1)) >= max(abs(v2), abs(w2)):
        v, w = v1, w1
    else:
        v, w = v2, w2
    if abs(w) <= 1e-14 * max(1.0, abs(v)):
        return INF
    return sphere_point(v / w)
