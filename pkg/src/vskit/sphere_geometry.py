"""Circles and discs on the Riemann sphere via Hermitian forms.

A circle is the zero set of  A|z|^2 + 2 Re(conj(B) z) + C  with A, C real
and B complex, subject to |B|^2 - A*C > 0.  A = 0 gives a line, i.e. a
circle through infinity.  Coefficients are normalized so the discriminant
|B|^2 - A*C equals 1, with a canonical overall sign, which makes circle
comparison a plain coefficient comparison.

Disjointness questions are answered through the inversive product of the
oriented forms; it is invariant under Moebius maps, so no special cases
for lines or discs containing infinity are needed.
"""

import cmath
import math

from .moebius import INF, MoebiusMap, sphere_point, chordal  # noqa: F401

TOL = 1e-9
_LINE_BAND = 1e-12   # |A| below this counts as a line


class DegenerateWitnessError(ValueError):
    """All interior witness candidates landed on the image boundary."""


class SphereCircle:
    """A circle on the sphere, stored as a normalized Hermitian form."""

    __slots__ = ("A", "B", "C")

    def __init__(self, A, B, C):
        A = float(A)
        B = complex(B)
        C = float(C)
        disc = abs(B) ** 2 - A * C
        if disc <= 1e-24:
            raise ValueError("form does not define a real circle")
        s = math.sqrt(disc)
        self._store(A / s, B / s, C / s)

    def _store(self, A, B, C):
        # canonical sign: first sufficiently nonzero coefficient positive,
        # judged relative to the coefficient scale
        scale = max(abs(A), abs(B.real), abs(B.imag), abs(C), 1e-300)
        for lead in (A, B.real, B.imag, C):
            if abs(lead) > 1e-9 * scale:
                if lead < 0:
                    A, B, C = -A, -B, -C
                break
        self.A = A
        self.B = B
        self.C = C

    @classmethod
    def _from_normalized(cls, A, B, C):
        """Build from coefficients already known to have discriminant 1.

        Recomputing |B|^2 - A*C cancels catastrophically once the circle
        is tiny (coefficients ~1/radius), while the det-1 congruence that
        produces such forms preserves the discriminant exactly, so the
        algebra is trusted instead.
        """
        obj = cls.__new__(cls)
        obj._store(float(A), complex(B), float(C))
        return obj

    @classmethod
    def from_center_radius(cls, center, radius):
        center = complex(center)
        radius = float(radius)
        if radius <= 0:
            raise ValueError("radius must be positive")
        # write the normalized form directly: dividing by the radius here
        # avoids the cancellation |center|^2 - (|center|^2 - radius^2)
        A = 1.0 / radius
        B = -center / radius
        C = (center.real ** 2 + center.imag ** 2) / radius - radius
        obj = cls.__new__(cls)
        obj._store(A, B, C)
        return obj

    @classmethod
    def from_line(cls, p, q):
        """The line through two finite points (a circle through INF)."""
        p = complex(p)
        q = complex(q)
        if abs(p - q) <= 1e-14:
            raise ValueError("need two distinct points")
        direction = (q - p) / abs(q - p)
        normal = 1j * direction
        return cls(0.0, normal, -2.0 * (normal.conjugate() * p).real)

    def eval(self, point):
        """Value of the form at a sphere point; at INF this is A."""
        point = sphere_point(point)
        if point is INF:
            return self.A
        return (self.A * abs(point) ** 2
                + 2.0 * (self.B.conjugate() * point).real + self.C)

    def is_line(self):
        return abs(self.A) <= _LINE_BAND

    def center_radius(self):
        if self.is_line():
            raise ValueError("line has no finite center")
        center = -self.B / self.A
        radius = 1.0 / abs(self.A)   # sqrt(disc)/|A| with disc normalized to 1
        return center, radius

    def a_point(self):
        """Some point on the circle."""
        if self.is_line():
            return sphere_point(-self.C * self.B / (2.0 * abs(self.B) ** 2))
        center, radius = self.center_radius()
        return sphere_point(center + radius)

    def spherical_diameter(self):
        """Chordal diameter of the circle (the unit circle has diameter 2)."""
        return 4.0 / math.sqrt(4.0 * abs(self.B) ** 2 + (self.A - self.C) ** 2)

    def __repr__(self):
        if self.is_line():
            return f"SphereCircle(line, B={self.B:.6g}, C={self.C:.6g})"
        center, radius = self.center_radius()
        return f"SphereCircle(center={center:.6g}, radius={radius:.6g})"


def circles_equal(c1, c2, tol=TOL):
    return (abs(c1.A - c2.A) <= tol and abs(c1.B - c2.B) <= tol
            and abs(c1.C - c2.C) <= tol)


def _pushforward(m, A, B, C):
    """Transport a Hermitian form through m by the inverse congruence.

    Returns the raw (un-renormalized) image coefficients.  The values of
    the form are carried over pointwise up to a positive factor, so the
    sign of the form is preserved, not just its zero set.
    """
    inv = m.inverse()
    if m.conformal:
        n1, n2, n3, n4 = inv.entries
    else:
        # anticonformal image pushes the conjugated form through M^-1;
        # inverse() of an anticonformal map stores conj(M^-1), so undo that
        n1, n2, n3, n4 = (e.conjugate() for e in inv.entries)
        B = complex(B).conjugate()
    Bc = complex(B).conjugate()
    t11 = A * n1 + B * n3
    t12 = A * n2 + B * n4
    t21 = Bc * n1 + C * n3
    t22 = Bc * n2 + C * n4
    A2 = (n1.conjugate() * t11 + n3.conjugate() * t21).real
    B2 = n1.conjugate() * t12 + n3.conjugate() * t22
    C2 = (n2.conjugate() * t12 + n4.conjugate() * t22).real
    return A2, B2, C2


def map_circle(m, circle):
    """Image of a circle under a Moebius map (conformal or not)."""
    A2, B2, C2 = _pushforward(m, circle.A, circle.B, circle.C)
    return SphereCircle._from_normalized(A2, B2, C2)


class SphereDisc:
    """One of the two discs bounded by a circle.

    A point p is inside exactly when side * circle.eval(p) < 0.
    """

    __slots__ = ("circle", "side")

    def __init__(self, circle, side):
        if side not in (1, -1):
            raise ValueError("side must be +1 or -1")
        self.circle = circle
        self.side = side

    @classmethod
    def from_center_radius(cls, center, radius, inside=True):
        circle = SphereCircle.from_center_radius(center, radius)
        probe = circle.eval(complex(center))
        side = -_sign(probe) if inside else _sign(probe)
        return cls(circle, side)

    def oriented(self):
        """Coefficients of the form that is negative exactly inside."""
        return (self.side * self.circle.A, self.side * self.circle.B,
                self.side * self.circle.C)

    def signed_eval(self, point):
        return self.side * self.circle.eval(point)

    def contains(self, point, tol=0.0):
        return self.signed_eval(point) < -tol

    def complement(self):
        return SphereDisc(self.circle, -self.side)

    def interior_candidates(self):
        """A few interior points, most central first."""
        circle = self.circle
        if circle.is_line():
            base = -circle.C * circle.B / (2.0 * abs(circle.B) ** 2)
            return (sphere_point(base - self.side * circle.B),
                    sphere_point(base - 3.0 * self.side * circle.B))
        center, radius = circle.center_radius()
        if self.side * circle.A > 0:
            return (sphere_point(center),
                    sphere_point(center + 0.5 * radius),
                    sphere_point(center + 0.5j * radius))
        far = abs(center) + 3.0 * radius + 1.0
        return (INF, sphere_point(center + 2.0 * radius),
                sphere_point(far))

    def interior_point(self):
        for p in self.interior_candidates():
            if self.contains(p):
                return p
        raise DegenerateWitnessError("no interior witness found")

    def __repr__(self):
        word = "inside" if self.side * self.circle.A > 0 else "outside-or-half"
        return f"SphereDisc({self.circle!r}, {word})"


def _sign(x):
    return 1 if x > 0 else -1


def discs_same(d1, d2, tol=TOL):
    if not circles_equal(d1.circle, d2.circle, tol):
        return False
    A1, B1, C1 = d1.oriented()
    A2, B2, C2 = d2.oriented()
    return abs(A1 - A2) <= tol and abs(B1 - B2) <= tol and abs(C1 - C2) <= tol


def disc_image(m, disc):
    """Image disc under a Moebius map.

    The side is read off the transported oriented form rather than from a
    witness point: evaluating the form at an interior point of a tiny disc
    cancels catastrophically, while the congruence keeps the sign exact at
    any scale.
    """
    A, B, C = disc.oriented()
    A2, B2, C2 = _pushforward(m, A, B, C)
    circle = SphereCircle._from_normalized(A2, B2, C2)
    raw = (A2, B2.real, B2.imag, C2)
    canon = (circle.A, circle.B.real, circle.B.imag, circle.C)
    k = max(range(4), key=lambda i: abs(canon[i]))
    return SphereDisc(circle, _sign(raw[k] * canon[k]))


def inversive_product(d1, d2):
    """Inversive product of two oriented discs.

    For normalized oriented forms: < -1 disjoint closed discs, exactly -1
    externally tangent, in (-1, 1) crossing boundaries, exactly 1
    internally tangent, > 1 nested.  Moebius-invariant.
    """
    A1, B1, C1 = d1.oriented()
    A2, B2, C2 = d2.oriented()
    return ((B1 * B2.conjugate()).real * 2.0 - A1 * C2 - A2 * C1) / 2.0


def disc_relation(d1, d2, tol=TOL):
    """One of 'disjoint', 'touching', 'meets' for closed discs.

    'touching' means externally tangent: interiors disjoint, boundaries
    sharing one point.  It is reported separately and never folded into
    either other answer.  The inversive product alone cannot tell two
    disjoint discs from two discs that jointly cover the sphere (the
    product is invariant under flipping both sides), so the low band is
    resolved with a boundary point test.
    """
    p = inversive_product(d1, d2)
    if p > -1.0 + tol:
        return "meets"
    boundary = d2.circle.a_point()
    if d1.signed_eval(boundary) < -tol:
        return "meets"            # boundary of d2 inside d1: covering pair
    if p < -1.0 - tol:
        return "disjoint"
    return "touching"


def discs_disjoint(d1, d2, tol=TOL):
    return disc_relation(d1, d2, tol) == "disjoint"


def disc_contains(outer, inner, tol=TOL):
    """Whether the closed inner disc sits inside the closed outer disc."""
    p = inversive_product(inner, outer)
    if p < 1.0 - tol:
        return False
    boundary = inner.circle.a_point()
    return outer.signed_eval(boundary) <= tol


def circles_disjoint(c1, c2, tol=TOL):
    """Whether two circles are disjoint as curves (tangency is not disjoint)."""
    d1 = SphereDisc(c1, 1)
    d2 = SphereDisc(c2, 1)
    return abs(inversive_product(d1, d2)) > 1.0 + tol


def circle_separates(circle, p, q, tol=TOL):
    """Whether the circle separates two sphere points.

    Points on the circle (within tol) are never certified as separated.
    """
    vp = circle.eval(p)
    vq = circle.eval(q)
    if abs(vp) <= tol or abs(vq) <= tol:
        return False
    return (vp > 0) != (vq > 0)


def spherical_diameter(circle):
    return circle.spherical_diameter()
