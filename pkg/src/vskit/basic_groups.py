"""The seven basic group types T1-T7 and their B3 amalgams.

Each type is built from explicit matrices in a standard position:

  T1  E(z) = e^(2 pi i/n) z, a finite cyclic rotation group;
  T2  L(z) = lambda z, infinite cyclic loxodromic;
  T3  U(z) = -z and V(z) = 1/z, the Klein four group;
  T4  A(z) = lambda z with E as in T1 (commuting pair);
  T5  T4's loxodromic normalized by the T3 pair (V inverts A);
  T6  adds B fixing +-1, so <A, B> is Schottky of rank two;
  T7  adds C fixing +-i, so <A, B, C> is Schottky of rank three;
  B3  chains of T3/T5/T6 components amalgamated over shared involutions.

Every constructor verifies its relation suite projectively and records
the distinguished Schottky generators, the finite abelian quotient H,
and the symbolic leaf structure used by the algebra layer.
"""

from dataclasses import dataclass
from fractions import Fraction
import cmath
import math

from .moebius import (MoebiusMap, classify, projectively_equal,
                      is_identity_map, fixed_points, INF, TOL)
from .sphere_geometry import SphereCircle, SphereDisc, map_circle, disc_image
from .schottky import PairingSystem, verify_pairing
from .group_algebra import (FiniteAbelianGroup, LeafSymbolic, QuotientMap,
                            TRIVIAL_GROUP, euler_characteristic,
                            symbolic_model)
from . import combination
from .combination import Leaf, free_product, CombinationError

BASIC_TYPES = ("T1", "T2", "T3", "T4", "T5", "T6", "T7")

_LAMBDA_MARGIN = 1e-9


class BasicGroupError(ValueError):
    pass


class PairingConstructionError(BasicGroupError):
    """No circle family for the requested parameters (or none known)."""


@dataclass(frozen=True)
class OrbifoldSignature:
    genus: int
    cone_orders: tuple

    def __post_init__(self):
        object.__setattr__(self, "cone_orders",
                           tuple(sorted(int(m) for m in self.cone_orders)))

    def __str__(self):
        cones = ",".join(str(m) for m in self.cone_orders)
        return f"({self.genus};{cones})"


# ---------------------------------------------------------------------------
# matrices


def _rotation(n):
    w = cmath.exp(1j * math.pi / n)
    return MoebiusMap(w, 0, 0, 1 / w)


def _scaling(lam):
    s = cmath.sqrt(lam)
    return MoebiusMap(s, 0, 0, 1 / s)


def _axis_loxodromic(lam):
    """Multiplier-lam loxodromic fixing -1 (attracting) and +1."""
    return MoebiusMap(lam + 1, 1 - lam, 1 - lam, lam + 1)


def _imaginary_axis_loxodromic(lam):
    """Multiplier-lam loxodromic fixing -i (attracting) and +i."""
    return MoebiusMap(lam + 1, 1j * (1 - lam), 1j * (lam - 1), lam + 1)


_NEGATE = MoebiusMap(1, 0, 0, -1)      # z -> -z
_INVERT = MoebiusMap(0, 1, 1, 0)       # z -> 1/z


def _check_n(n):
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise BasicGroupError("n must be an integer >= 2")
    return n


def _check_lambda(lam, tag="lambda"):
    if lam is None:
        raise BasicGroupError(f"{tag} is required")
    lam = complex(lam)
    if abs(lam) <= 1.0 + _LAMBDA_MARGIN:
        raise BasicGroupError(f"{tag} must satisfy |{tag}| > 1")
    return lam


def _verify(condition, message):
    if not condition:
        raise RuntimeError(f"internal relation check failed: {message}")


def _inverts(t, m):
    return projectively_equal(t * m * t.inverse(), m.inverse())


def _commutes(t, m):
    return projectively_equal(t * m, m * t)


# ---------------------------------------------------------------------------
# the BasicGroup value


class BasicGroup:
    """A basic virtual Schottky group: named matrices plus structure data.

    Immutable by convention.  `gens` maps full generator names to
    MoebiusMaps, `schottky_names` lists the generators of the
    distinguished free normal subgroup G, `quotient` is H = K/G, and
    `symbolic` is the exact algebraic model of the leaf.  Composite
    groups built from a construction tree (B3) also carry `tree`.
    """

    def __init__(self, btype, params, gens, schottky_names, symbolic,
                 quotient, rank, index, prefix="", frame=None, tree=None,
                 cone_count=None, theta=None):
        self.btype = btype
        self.params = dict(params)
        self.gens = dict(gens)
        self.schottky_names = tuple(schottky_names)
        self.symbolic = symbolic
        self.quotient = quotient
        self.rank = int(rank)
        self.index = int(index)
        self.chi = Fraction(1 - self.rank, self.index)
        self.prefix = prefix
        self.frame = frame if frame is not None else MoebiusMap.identity()
        self.tree = tree
        self.cone_count = cone_count
        self._theta = theta

    # -- descriptive -------------------------------------------------------

    @property
    def label(self):
        if self.btype == "B3" and self.tree is not None:
            return f"B3[{self.cone_count} cones]"
        items = []
        for key, value in self.params.items():
            if isinstance(value, complex) and value.imag == 0:
                value = value.real
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            items.append(f"{key}={value}")
        inner = ", ".join(items)
        tag = f"{self.btype}({inner})" if inner else self.btype
        if not is_identity_map(self.frame):
            tag += " (conjugated)"
        return tag

    @property
    def generator_names(self):
        return tuple(self.gens)

    @property
    def schottky_generators(self):
        return {name: self.gens[name] for name in self.schottky_names}

    def quotient_description(self):
        return list(self.quotient.orders)

    def in_standard_position(self):
        return is_identity_map(self.frame)

    def __repr__(self):
        return f"BasicGroup({self.label})"

    # -- transport ---------------------------------------------------------

    def conjugated_by(self, t):
        if self.tree is not None:
            raise BasicGroupError(
                "conjugation of composite (B3) groups is not supported")
        gens = {name: m.conjugated_by(t) for name, m in self.gens.items()}
        return BasicGroup(self.btype, self.params, gens, self.schottky_names,
                          self.symbolic, self.quotient, self.rank, self.index,
                          prefix=self.prefix, frame=t * self.frame,
                          theta=self._theta)

    def standard_scale(self):
        """Radius bound of the standard-position geometry (fixed points
        and pairing circles), used by auto-placement."""
        lam_abs = [abs(complex(v)) for k, v in self.params.items()
                   if k.startswith("lambda")]
        scale = 1.0
        for i, x in enumerate(lam_abs):
            s = math.sqrt(x)
            scale = max(scale, s)
            if self.btype in ("T6", "T7") and i >= 1:
                scale = max(scale, (s + 1.0) / (s - 1.0))
        return scale

    # -- algebra -----------------------------------------------------------

    def default_theta(self):
        """The canonical projection onto H: torsion generators to the
        standard basis, free generators to zero."""
        if self._theta is not None:
            return self._theta
        images = {}
        k = len(self.quotient.orders)
        for name in self.gens:
            images[name] = self.quotient.zero()
        for i, tname in enumerate(self.symbolic.torsion_names):
            e = [0] * k
            e[i] = 1
            images[tname] = tuple(e)
        return QuotientMap(self.quotient, images)

    # -- geometry ----------------------------------------------------------

    def _standard_pairing_circles(self):
        """(name, C, C') triples in standard position."""
        if self.btype == "B3":
            raise PairingConstructionError(
                "no standard circle family for composite groups")
        if not self.schottky_names:
            raise BasicGroupError(f"{self.btype} has no Schottky generators")
        for key, value in self.params.items():
            if key.startswith("lambda"):
                value = complex(value)
                if self.btype in ("T6", "T7") and abs(value.imag) > 0:
                    raise PairingConstructionError(
                        "circle certificates for T6/T7 need real multipliers")
        out = []
        lam1 = abs(complex(self.params.get("lambda")
                           or self.params.get("lambda1")))
        root = math.sqrt(lam1)
        first = self.schottky_names[0]
        circle = SphereCircle.from_center_radius(0.0, 1.0 / root)
        out.append((first, circle))
        if self.btype in ("T6", "T7"):
            lam2 = complex(self.params["lambda2"]).real
            edge = _annulus_threshold(lam2)
            if lam1 <= edge + 1e-9:
                raise PairingConstructionError(
                    f"concentric circle family needs lambda1 > {edge:.6g} "
                    f"for lambda2 = {lam2:.6g}")
            out.append((self.schottky_names[1], _apollonius_circle(lam2)))
        if self.btype == "T7":
            lam3 = complex(self.params["lambda3"]).real
            edge = _annulus_threshold(lam3)
            if lam1 <= edge + 1e-9:
                raise PairingConstructionError(
                    f"concentric circle family needs lambda1 > {edge:.6g} "
                    f"for lambda3 = {lam3:.6g}")
            lam2 = complex(self.params["lambda2"]).real
            c2, r2 = _apollonius_center_radius(lam2)
            c3, r3 = _apollonius_center_radius(lam3)
            if math.hypot(c2, c3) <= r2 + r3 + 1e-9:
                raise PairingConstructionError(
                    "the discs around +-1 and +-i overlap for "
                    f"lambda2 = {lam2:.6g}, lambda3 = {lam3:.6g}")
            out.append((self.schottky_names[2],
                        _apollonius_circle(lam3, imaginary=True)))
        return out

    def pairing_system(self, verify=True, tol=TOL):
        """A verified circle pairing for the Schottky generators.

        Uses the concentric family: |z| = lambda1^(-1/2) paired with
        |z| = lambda1^(1/2), plus symmetric discs around the fixed pairs
        +-1 (and +-i).  Raises PairingConstructionError when that family
        cannot exist for the parameters.
        """
        triples = self._standard_pairing_circles()
        pairs = []
        for name, circle in triples:
            m = self.gens[name]
            if not self.in_standard_position():
                circle = map_circle(self.frame, circle)
            pairs.append((circle, map_circle(m, circle), m))
        system = PairingSystem(pairs)
        if verify:
            report = verify_pairing(system, tol=tol)
            if not report.ok:
                raise PairingConstructionError(
                    "pairing verification failed: "
                    + "; ".join(report.failures()))
        return system


def _annulus_threshold(lam):
    s = math.sqrt(lam)
    return ((s + 1.0) / (s - 1.0)) ** 2


def _apollonius_center_radius(lam):
    return (lam + 1.0) / (lam - 1.0), 2.0 * math.sqrt(lam) / (lam - 1.0)


def _apollonius_circle(lam, imaginary=False):
    c, r = _apollonius_center_radius(lam)
    return SphereCircle.from_center_radius(1j * c if imaginary else c, r)


# ---------------------------------------------------------------------------
# constructors


def make_basic(btype, n=None, lam=None, lam1=None, lam2=None, lam3=None,
               prefix=""):
    """Construct a basic group of the given type in standard position.

    Multipliers may be complex with |lambda| > 1; n is an integer >= 2.
    All relations of the type are verified projectively at construction.
    Generator names are prefixed with `prefix` for use inside trees.
    """
    if btype not in BASIC_TYPES:
        raise BasicGroupError(f"unknown basic type {btype!r}")
    p = prefix

    if btype == "T1":
        n = _check_n(n)
        E = _rotation(n)
        _verify(classify(E).kind == "elliptic" and classify(E).order == n,
                "E must be elliptic of order n")
        symbolic = LeafSymbolic((), FiniteAbelianGroup((n,)), (p + "E",),
                                ((),))
        return BasicGroup("T1", {"n": n}, {p + "E": E}, (),
                          symbolic, FiniteAbelianGroup((n,)), 0, n, prefix=p)

    if btype == "T2":
        lam = _check_lambda(lam if lam is not None else lam1)
        L = _scaling(lam)
        _verify(classify(L).kind == "loxodromic", "L must be loxodromic")
        symbolic = LeafSymbolic((p + "L",), TRIVIAL_GROUP, (), ())
        return BasicGroup("T2", {"lambda": lam}, {p + "L": L}, (p + "L",),
                          symbolic, TRIVIAL_GROUP, 1, 1, prefix=p)

    if btype == "T3":
        U, V = _NEGATE, _INVERT
        _verify(classify(U).order == 2 and classify(V).order == 2,
                "U, V must be involutions")
        _verify(_commutes(U, V), "U, V must commute")
        _verify(classify(U * V).order == 2, "UV must be an involution")
        symbolic = LeafSymbolic((), FiniteAbelianGroup((2, 2)),
                                (p + "U", p + "V"), ((), ()))
        return BasicGroup("T3", {}, {p + "U": U, p + "V": V}, (),
                          symbolic, FiniteAbelianGroup((2, 2)), 0, 4,
                          prefix=p)

    if btype == "T4":
        n = _check_n(n)
        lam = _check_lambda(lam if lam is not None else lam1)
        A = _scaling(lam)
        E = _rotation(n)
        _verify(classify(A).kind == "loxodromic", "A must be loxodromic")
        _verify(_commutes(A, E), "A and E must commute")
        symbolic = LeafSymbolic((p + "A",), FiniteAbelianGroup((n,)),
                                (p + "E",), ((1,),))
        return BasicGroup("T4", {"n": n, "lambda": lam},
                          {p + "A": A, p + "E": E}, (p + "A",),
                          symbolic, FiniteAbelianGroup((n,)), 1, n, prefix=p)

    if btype == "T5":
        lam = _check_lambda(lam if lam is not None else lam1)
        A = _scaling(lam)
        U, V = _NEGATE, _INVERT
        _verify(classify(A).kind == "loxodromic", "A must be loxodromic")
        _verify(_commutes(A, U), "A and U must commute")
        _verify(_inverts(V, A), "V must invert A")
        symbolic = LeafSymbolic((p + "A",), FiniteAbelianGroup((2, 2)),
                                (p + "U", p + "V"), ((1,), (-1,)))
        return BasicGroup("T5", {"lambda": lam},
                          {p + "A": A, p + "U": U, p + "V": V}, (p + "A",),
                          symbolic, FiniteAbelianGroup((2, 2)), 1, 4,
                          prefix=p)

    if btype == "T6":
        lam1 = _check_lambda(lam1, "lambda1")
        lam2 = _check_lambda(lam2, "lambda2")
        A = _scaling(lam1)
        B = _axis_loxodromic(lam2)
        U, V = _NEGATE, _INVERT
        _verify(classify(A).kind == "loxodromic", "A must be loxodromic")
        _verify(classify(B).kind == "loxodromic", "B must be loxodromic")
        _verify(_commutes(A, U), "A and U must commute")
        _verify(_commutes(B, V), "B and V must commute")
        _verify(_inverts(V, A), "V must invert A")
        _verify(_inverts(U, B), "U must invert B")
        symbolic = LeafSymbolic((p + "A", p + "B"), FiniteAbelianGroup((2, 2)),
                                (p + "U", p + "V"), ((1, -1), (-1, 1)))
        return BasicGroup("T6", {"lambda1": lam1, "lambda2": lam2},
                          {p + "A": A, p + "B": B, p + "U": U, p + "V": V},
                          (p + "A", p + "B"), symbolic,
                          FiniteAbelianGroup((2, 2)), 2, 4, prefix=p)

    # T7
    lam1 = _check_lambda(lam1, "lambda1")
    lam2 = _check_lambda(lam2, "lambda2")
    lam3 = _check_lambda(lam3, "lambda3")
    A = _scaling(lam1)
    B = _axis_loxodromic(lam2)
    C = _imaginary_axis_loxodromic(lam3)
    U, V = _NEGATE, _INVERT
    for m, tag in ((A, "A"), (B, "B"), (C, "C")):
        _verify(classify(m).kind == "loxodromic", f"{tag} must be loxodromic")
    _verify(_commutes(A, U), "A and U must commute")
    _verify(_commutes(B, V), "B and V must commute")
    _verify(_commutes(C, U * V), "C and UV must commute")
    _verify(_inverts(V, A), "V must invert A")
    _verify(_inverts(U, B), "U must invert B")
    _verify(_inverts(U, C), "U must invert C")
    _verify(_inverts(V, C), "V must invert C")
    symbolic = LeafSymbolic((p + "A", p + "B", p + "C"),
                            FiniteAbelianGroup((2, 2)), (p + "U", p + "V"),
                            ((1, -1, -1), (-1, 1, -1)))
    return BasicGroup("T7", {"lambda1": lam1, "lambda2": lam2,
                             "lambda3": lam3},
                      {p + "A": A, p + "B": B, p + "C": C,
                       p + "U": U, p + "V": V},
                      (p + "A", p + "B", p + "C"), symbolic,
                      FiniteAbelianGroup((2, 2)), 3, 4, prefix=p)


_CONE_TABLE = {"T1": None, "T2": (), "T3": (2, 2, 2), "T4": (),
               "T5": (2, 2, 2, 2), "T6": (2, 2, 2, 2, 2),
               "T7": (2, 2, 2, 2, 2, 2)}


def orbifold_signature(bg):
    """Signature of the quotient orbifold (Riemann sphere or torus with
    cone points) associated with the basic group."""
    if bg.btype == "T1":
        n = bg.params["n"]
        return OrbifoldSignature(0, (n, n))
    if bg.btype in ("T2", "T4"):
        return OrbifoldSignature(1, ())
    if bg.btype == "B3":
        return OrbifoldSignature(0, (2,) * bg.cone_count)
    return OrbifoldSignature(0, _CONE_TABLE[bg.btype])


# ---------------------------------------------------------------------------
# B3: amalgams of T3/T5/T6 components over shared involutions


@dataclass(frozen=True)
class Gluing:
    """One amalgam edge: full generator names on each side, plus an
    optional explicit disc certificate (B1 for the left factor)."""
    left: str
    right: str
    disc: object = None


def _two_point_frame(points):
    """Moebius map sending the two given sphere points to 0 and INF."""
    pp, q = points
    if pp is INF:
        pp, q = q, pp
    if q is INF:
        return MoebiusMap(1, -complex(pp), 0, 1)
    return MoebiusMap(1, -complex(pp), 1, -complex(q))


def _match_involution(target, source):
    """A conjugator F with F source F^-1 = target (both involutions)."""
    Qt = _two_point_frame(fixed_points(target))
    Qs = _two_point_frame(fixed_points(source))
    return Qt.inverse() * Qs


def _basis_change(H, a, b):
    """A linear automorphism of Z2 x Z2 sending b to a, as an image map."""
    if a == b:
        return lambda x: x
    # a, b distinct and nonzero: they form a basis; swap them
    def decompose(x):
        for alpha in (0, 1):
            for beta in (0, 1):
                v = H.add(H.scale(alpha, a), H.scale(beta, b))
                if v == x:
                    return alpha, beta
        raise ValueError("not spanned")
    def change(x):
        alpha, beta = decompose(x)
        return H.add(H.scale(alpha, b), H.scale(beta, a))
    return change


def _involution_names(bg):
    return [name for name in bg.symbolic.torsion_names]


def _glue_names(spec):
    return (spec,) if isinstance(spec, str) else tuple(spec)


def _glue_display(spec):
    return "*".join(_glue_names(spec))


def make_b3(components, gluings, spacing=3.0, depth=6):
    """Amalgamate T3/T5/T6 components over shared involutions.

    Components must carry distinct generator-name prefixes.  gluings[k]
    joins the running assembly (at components[k]) with components[k+1];
    each side names an order-2 generator, or a tuple of generators whose
    product has order 2 (the only usable involution of T6, U*V, is such a
    product; so is T5's).  Consecutive gluings must use distinct
    involutions of the shared middle component.  The right factor is
    conjugated so the named matrices agree, with discs auto-placed
    around the involution axis (growing retries), unless the gluing
    carries an explicit disc.
    """
    if not components:
        raise BasicGroupError("at least one component required")
    for bg in components:
        if bg.btype not in ("T3", "T5", "T6"):
            raise BasicGroupError(
                f"B3 components must be T3/T5/T6, got {bg.btype}")
    if len(gluings) != len(components) - 1:
        raise BasicGroupError("need exactly one gluing per added component")
    if len(components) == 1:
        return components[0]

    gluings = [g if isinstance(g, Gluing) else Gluing(*g) for g in gluings]
    for k in range(1, len(gluings)):
        if set(_glue_names(gluings[k].left)) == \
                set(_glue_names(gluings[k - 1].right)):
            raise BasicGroupError(
                "consecutive amalgams must use distinct involutions "
                f"({_glue_display(gluings[k].left)} reused)")

    assembly = Leaf(components[0])
    placed = [components[0]]
    theta = components[0].default_theta()
    images = dict(theta.images)
    H = components[0].quotient

    for k, glue in enumerate(gluings):
        right = components[k + 1]
        left_matrices = combination.collect_matrices(assembly)
        for name in _glue_names(glue.left):
            if name not in left_matrices:
                raise BasicGroupError(f"unknown left generator {name!r}")
        for name in _glue_names(glue.right):
            if name not in right.gens:
                raise BasicGroupError(f"unknown right generator {name!r}")
        u_left = math.prod((left_matrices[n] for n in _glue_names(glue.left)),
                           start=MoebiusMap.identity())
        u_right = math.prod((right.gens[n] for n in _glue_names(glue.right)),
                            start=MoebiusMap.identity())
        if classify(u_left).order != 2:
            raise BasicGroupError(
                f"{_glue_display(glue.left)} is not an involution")
        if classify(u_right).order != 2:
            raise BasicGroupError(
                f"{_glue_display(glue.right)} is not an involution")

        if glue.disc is not None:
            if not projectively_equal(u_left, u_right):
                raise BasicGroupError(
                    "explicit-disc gluing requires pre-aligned components "
                    f"({_glue_display(glue.left)} != "
                    f"{_glue_display(glue.right)} as matrices)")
            node = free_product(assembly, Leaf(right),
                                (glue.left, glue.right),
                                glue.disc, glue.disc.complement(), depth)
            placed_right = right
        else:
            node = None
            last_error = None
            Q = _two_point_frame(fixed_points(u_left))
            Qinv = Q.inverse()
            for attempt in range(4):
                sigma = spacing * (2.0 ** attempt)
                push = MoebiusMap(sigma * sigma, 0, 0, 1)
                F = Qinv * push * _two_point_frame(fixed_points(u_right))
                candidate = right.conjugated_by(F)
                disc_w = SphereDisc(
                    SphereCircle.from_center_radius(0.0, sigma), -1)
                B1 = disc_image(Qinv, disc_w)
                try:
                    node = free_product(assembly, Leaf(candidate),
                                        (glue.left, glue.right),
                                        B1, B1.complement(), depth)
                    placed_right = candidate
                    break
                except CombinationError as err:
                    last_error = err
            if node is None:
                raise BasicGroupError(
                    "auto-placement failed for gluing "
                    f"{_glue_display(glue.left)} ~ "
                    f"{_glue_display(glue.right)}: {last_error}")

        # merge theta: remap the right component's images so the glued
        # involutions agree in H
        right_theta = placed_right.default_theta()
        a = H.zero()
        for name in _glue_names(glue.left):
            a = H.add(a, images[name])
        b = H.zero()
        for name in _glue_names(glue.right):
            b = H.add(b, right_theta.images[name])
        change = _basis_change(H, a, b)
        for name, img in right_theta.images.items():
            images[name] = change(img)
        placed.append(placed_right)
        assembly = node

    chi = euler_characteristic(assembly)
    rank = 1 - 4 * chi
    if rank.denominator != 1:
        raise RuntimeError("internal error: non-integer B3 rank")
    cone_count = sum(len(_CONE_TABLE[bg.btype]) for bg in components) \
        - 2 * len(gluings)
    gens = combination.collect_matrices(assembly)
    schottky = tuple(n for bg in placed for n in bg.schottky_names)
    theta = QuotientMap(H, images)
    return BasicGroup("B3", {}, gens, schottky, symbolic_model(assembly), H,
                      int(rank), 4, tree=assembly, cone_count=cone_count,
                      theta=theta)
