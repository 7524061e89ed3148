"""Cyclic-quotient signatures and their geometric realizations.

A virtual Schottky group K whose quotient by its Schottky kernel is
Z_n splits, by Klein-Maskit combination, as a free product of four
kinds of factors: `a` loxodromic cyclic groups <tau_j>, `b` rank-one
abelian groups <eta_j, theta_j> = Z + Z_{m_j}, `c` involution groups
<gamma_j>, and `d` elliptic cyclic groups <epsilon_j> of order n_j.
The kernel is then a free (Schottky) group of rank

    g = n (a + b + c/2 + d - 1) + 1 - n sum_j 1/n_j,

and surjectivity of the exponent map K -> Z_n pins the counts to one
of three admissibility clauses.  This module enumerates the admissible
signatures for a given n and realizes each one as a chain of basic
groups along the real axis, with the exponent map attached.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .basic_groups import make_basic
from .combination import (Leaf, PlacementChain, station_frame,
                          uncertified_free_product)
from .group_algebra import FiniteAbelianGroup, QuotientMap, kernel_rank

__all__ = ["CyclicSignature", "CyclicConstruction", "kernel_genus",
           "enumerate_signatures", "build_cyclic", "isomorphism_type",
           "describe"]


def _check_count(value, tag):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValueError(f"{tag} must be an integer >= 0")
    return value


def kernel_genus(n, a, b, c, n_orders):
    """Exact rank n(a+b+c/2+d-1) + 1 - sum_j n/n_j of the kernel.

    d is the length of n_orders; the m-orders of the rank-one abelian
    factors enter only through their count b.
    """
    g = Fraction(2 * n * (a + b + len(n_orders) - 1) + n * c + 2, 2)
    for v in n_orders:
        g -= Fraction(n, v)
    return g


def _admissibility_problems(n, a, b, c, n_orders):
    problems = []
    if c > 0 and n % 2:
        problems.append("involution count c > 0 requires even n")
    if a + b > 0:
        return problems
    cofactors = [n // v for v in n_orders]
    if c > 0:
        if math.gcd(n // 2, *cofactors) != 1:
            problems.append(
                "a = b = 0 < c needs GCD(n/2, n/n_1, ..., n/n_d) = 1")
    elif math.gcd(*cofactors) != 1:
        problems.append("a = b = c = 0 needs GCD(n/n_1, ..., n/n_d) = 1")
    return problems


@dataclass(frozen=True)
class CyclicSignature:
    """Admissible factor counts for a virtual Schottky group over Z_n.

    `a` counts loxodromic cyclic factors, m_orders lists the torsion
    orders of the rank-one abelian factors Z + Z_m (so b is its length),
    `c` counts involution factors, and n_orders lists elliptic factor
    orders in {3, ..., n} (so d is its length); every listed order must
    divide n.  Admissibility requires exactly one of: (1) a + b > 0;
    (2) a = b = 0 < c and GCD(n/2, n/n_1, ..., n/n_d) = 1; (3)
    a = b = c = 0 and GCD(n/n_1, ..., n/n_d) = 1, with c > 0 only for
    even n.  These are the conditions making the exponent map onto Z_n
    surjective with torsion-free kernel; they also force the genus g to
    be a nonnegative integer.
    """

    n: int
    a: int = 0
    c: int = 0
    m_orders: tuple = ()
    n_orders: tuple = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) \
                or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        _check_count(self.a, "a")
        _check_count(self.c, "c")
        for attr, low, tag in (("m_orders", 2, "m"), ("n_orders", 3, "n")):
            orders = tuple(sorted(getattr(self, attr)))
            for v in orders:
                _check_count(v, f"{tag}_j")
                if not low <= v <= self.n or self.n % v:
                    raise ValueError(
                        f"{tag}_j = {v} must lie in {{{low}, ..., {self.n}}}"
                        f" and divide n = {self.n}")
            object.__setattr__(self, attr, orders)
        problems = _admissibility_problems(self.n, self.a, self.b, self.c,
                                           self.n_orders)
        # orders divide n here, so twice the genus is an even integer
        twice = 2 * self.n * (self.a + self.b + self.d - 1) \
            + self.n * self.c + 2 - 2 * sum(self.n // v
                                            for v in self.n_orders)
        if twice % 2 or twice < 0:
            problems.append(
                f"genus {Fraction(twice, 2)} is not a nonnegative integer")
        if problems:
            raise ValueError("; ".join(problems))
        object.__setattr__(self, "_g", twice // 2)

    @property
    def b(self):
        return len(self.m_orders)

    @property
    def d(self):
        return len(self.n_orders)

    @property
    def g(self):
        return self._g

    @property
    def clause(self):
        """Which admissibility clause the counts satisfy (1, 2 or 3)."""
        if self.a + self.b > 0:
            return 1
        return 2 if self.c > 0 else 3

    @property
    def elementary(self):
        """Kernel rank 0 or 1; the group is elementary, not Schottky-like."""
        return self.g <= 1

    @property
    def leaf_count(self):
        return self.a + self.b + self.c + self.d


def enumerate_signatures(n, g_max):
    """Every admissible signature over Z_n with genus at most g_max.

    Complete and deterministic: each unit of a or b adds n to the genus,
    each involution adds n/2 and each elliptic factor of order v adds
    n - n/v, so the loop bounds below cover all candidates and an exact
    genus filter discards the overshoot.  Sorted by
    (g, a, b, c, d, m_orders, n_orders).
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError("n must be an integer >= 2")
    _check_count(g_max, "g_max")
    m_divs = [m for m in range(2, n + 1) if n % m == 0]
    e_divs = [v for v in range(3, n + 1) if n % v == 0]
    amax = (g_max - 1) // n + 1
    cmax = (2 * (g_max - 1)) // n + 2 if n % 2 == 0 else 0
    e_combos = [((), 0)]
    if e_divs:
        step = n - n // min(e_divs)
        dmax = (g_max + n - 1) // step
        e_combos = [(orders, 2 * n * d - 2 * sum(n // v for v in orders))
                    for d in range(dmax + 1)
                    for orders in combinations_with_replacement(e_divs, d)]
    out = []
    for a in range(amax + 1):
        for b in range(amax - a + 1):
            m_combos = list(combinations_with_replacement(m_divs, b))
            for c in range(cmax + 1):
                base = 2 * n * (a + b - 1) + n * c + 2  # twice the d=0 genus
                for orders, bump in e_combos:
                    twice = base + bump
                    if twice % 2 or not 0 <= twice <= 2 * g_max:
                        continue
                    if _admissibility_problems(n, a, b, c, orders):
                        continue
                    for m_orders in m_combos:
                        out.append(CyclicSignature(
                            n, a=a, c=c, m_orders=m_orders, n_orders=orders))
    out.sort(key=lambda s: (s.g, s.a, s.b, s.c, s.d, s.m_orders, s.n_orders))
    return out


def isomorphism_type(sig):
    """Canonical free-product expression for the group, as a string."""
    parts = ["Z"] * sig.a
    parts += [f"(Z + Z_{m})" for m in sig.m_orders]
    parts += ["Z_2"] * sig.c
    parts += [f"Z_{v}" for v in sig.n_orders]
    return " * ".join(parts)


def describe(sig):
    """One-line record for enumeration listings."""
    m = ",".join(str(x) for x in sig.m_orders)
    e = ",".join(str(x) for x in sig.n_orders)
    line = (f"g={sig.g} a={sig.a} b={sig.b} c={sig.c} d={sig.d} "
            f"m_orders=[{m}] n_orders=[{e}] K = {isomorphism_type(sig)}")
    if sig.elementary:
        line += " [elementary]"
    return line


@dataclass(frozen=True)
class CyclicConstruction:
    """A realized signature: placed leaves, their tree, the exponent map."""

    signature: CyclicSignature
    tree: object
    theta: QuotientMap
    groups: tuple

    def rank_report(self):
        return kernel_rank(self.tree, self.theta)


def _leaf_specs(sig, multiplier):
    """(make_basic kwargs, cache key, theta images) per leaf, in order."""
    specs = []
    for j in range(1, sig.a + 1):
        specs.append((dict(btype="T2", lam=multiplier, prefix=f"t{j}."),
                      {f"t{j}.L": (1,)}))
    for j, m in enumerate(sig.m_orders, start=1):
        specs.append((dict(btype="T4", n=m, lam=multiplier, prefix=f"h{j}."),
                      {f"h{j}.A": (1,), f"h{j}.E": (sig.n // m,)}))
    for j in range(1, sig.c + 1):
        specs.append((dict(btype="T1", n=2, prefix=f"g{j}."),
                      {f"g{j}.E": (sig.n // 2,)}))
    for j, v in enumerate(sig.n_orders, start=1):
        specs.append((dict(btype="T1", n=v, prefix=f"e{j}."),
                      {f"e{j}.E": (sig.n // v,)}))
    return specs


# Placed leaves recur endlessly across an enumeration sweep (same type,
# same prefix, same station), so the uncertified path interns them.  The
# nodes are immutable and conjugated copies, safe to share between trees.
_STATION_CACHE = {}


def _station_leaf(kwargs, station, spacing, pull):
    key = (tuple(sorted(kwargs.items())), station, spacing, pull)
    node = _STATION_CACHE.get(key)
    if node is None:
        group = make_basic(**kwargs)
        frame = station_frame(2.0 * spacing * station,
                              group.standard_scale(), pull)
        node = Leaf(group.conjugated_by(frame))
        _STATION_CACHE[key] = node
    return node


def build_cyclic(sig, spacing=3.0, depth=6, certify=True, multiplier=4.0,
                 pull=8.0):
    """Realize the signature as a chain of basic groups along the real axis.

    Leaves are placed left to right: `a` loxodromic cyclic leaves (the
    tau_j), `b` rank-one abelian leaves with torsion orders m_j (the
    eta_j, theta_j pairs), `c` involution leaves (the gamma_j), `d`
    elliptic leaves of orders n_j (the epsilon_j).  The exponent map
    sends every loxodromic generator to 1 and a torsion generator of
    order k to n/k, which has order exactly k in Z_n, so the kernel
    stays torsion-free; the admissibility clauses make the map onto.
    Certified placement retries with doubled gaps on certificate
    failure, then raises CombinationError; certify=False skips the
    hypothesis checks and shares interned leaves between builds.
    """
    specs = _leaf_specs(sig, multiplier)
    images = {}
    for _, leaf_images in specs:
        images.update(leaf_images)
    theta = QuotientMap(FiniteAbelianGroup((sig.n,)), images)
    if certify:
        chain = PlacementChain(spacing=spacing, depth=depth, pull=pull)
        for kwargs, _ in specs:
            chain.append(make_basic(**kwargs))
        return CyclicConstruction(sig, chain.node, theta,
                                  tuple(chain.groups))
    node = None
    groups = []
    for station, (kwargs, _) in enumerate(specs):
        leaf = _station_leaf(kwargs, station, spacing, pull)
        node = leaf if node is None else uncertified_free_product(node, leaf)
        groups.append(leaf.group)
    return CyclicConstruction(sig, node, theta, tuple(groups))
