"""Symbolic layer: words, normal forms, quotients, and kernel ranks.

Groups are modeled structurally.  A leaf group is a semidirect product
F_r x| T of a free group by a finite abelian group acting by inverting
some free generators; its elements (w, t) are already normal forms.
Internal nodes are free products (possibly amalgamated over a shared
involution) and HNN extensions; free-product elements use the classical
alternating coset-representative normal form, so identity testing and
deduplication are exact, not numerical.

Ranks of kernels of quotient maps onto finite abelian groups come from
the Euler characteristic: chi is additive over free products (minus the
amalgam's chi) and an HNN extension subtracts the edge group's chi; for
a finite-index subgroup, chi multiplies by the index, and a free group
of rank r has chi = 1 - r.  Hence kernel_rank = 1 - |H| * chi.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math


class UnsupportedSymbolicError(NotImplementedError):
    """The symbolic model does not cover this construction shape."""


# ---------------------------------------------------------------------------
# finite abelian groups


class FiniteAbelianGroup:
    """Z_{d1} x ... x Z_{dk}; elements are exponent tuples mod d_i.

    >>> H = FiniteAbelianGroup((2, 2))
    >>> H.add((1, 0), (1, 1))
    (0, 1)
    >>> H.order
    4
    >>> H.element_order((1, 1))
    2
    >>> FiniteAbelianGroup((6,)).label()
    'Z_6'
    """

    def __init__(self, orders):
        orders = tuple(int(d) for d in orders)
        if any(d < 2 for d in orders):
            raise ValueError("cyclic orders must be at least 2")
        self.orders = orders

    @property
    def order(self):
        return math.prod(self.orders)

    def zero(self):
        return (0,) * len(self.orders)

    def add(self, x, y):
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x):
        return tuple((-a) % d for a, d in zip(x, self.orders))

    def scale(self, k, x):
        return tuple((k * a) % d for a, d in zip(x, self.orders))

    def element(self, x):
        x = tuple(int(a) for a in x)
        if len(x) != len(self.orders):
            raise ValueError("wrong exponent-vector length")
        return tuple(a % d for a, d in zip(x, self.orders))

    def elements(self):
        return itertools.product(*(range(d) for d in self.orders))

    def element_order(self, x):
        out = 1
        for a, d in zip(x, self.orders):
            out = math.lcm(out, d // math.gcd(a, d))
        return out

    def subgroup(self, generators):
        """All elements generated by the given ones (BFS closure)."""
        seen = {self.zero()}
        frontier = [self.zero()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in generators:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def generated_by(self, generators):
        return len(self.subgroup(generators)) == self.order

    def is_trivial(self):
        return not self.orders

    def label(self):
        if not self.orders:
            return "trivial"
        return " x ".join(f"Z_{d}" for d in self.orders)

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and \
            self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return f"FiniteAbelianGroup({self.orders})"


TRIVIAL_GROUP = FiniteAbelianGroup(())


# ---------------------------------------------------------------------------
# leaf groups: F_r x| T with T acting by inversions


def reduce_free_word(letters):
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class LeafSymbolic:
    """Symbolic group F_r x| T, T finite abelian acting by sign flips.

    Elements are pairs (word, t): a reduced word over signed free-generator
    indices (1-based) times a torsion exponent vector.  Multiplication is
    (w1, t1)(w2, t2) = (w1 * phi_{t1}(w2), t1 + t2), where phi_t inverts
    the free generators whose action sign under t is -1.  The pair itself
    is a normal form, so equality is structural.
    """

    def __init__(self, free_names, torsion, torsion_names, action):
        self.free_names = tuple(free_names)
        self.torsion = torsion
        self.torsion_names = tuple(torsion_names)
        if len(self.torsion_names) != len(torsion.orders):
            raise ValueError("one name per cyclic factor required")
        action = tuple(tuple(row) for row in action)
        if len(action) != len(torsion.orders):
            raise ValueError("one action row per torsion generator")
        for row in action:
            if len(row) != len(self.free_names) or \
                    any(s not in (1, -1) for s in row):
                raise ValueError("action rows are +-1 signs per free generator")
        self.action = action

    @property
    def rank(self):
        return len(self.free_names)

    def identity(self):
        return ((), self.torsion.zero())

    def is_identity(self, x):
        return x == self.identity()

    def signs(self, t):
        """Per-free-generator sign of the action of torsion element t."""
        out = [1] * self.rank
        for row, e in zip(self.action, t):
            if e % 2:
                for j, s in enumerate(row):
                    if s < 0:
                        out[j] = -out[j]
        return out

    def _twist(self, t, word):
        signs = self.signs(t)
        return tuple(x * signs[abs(x) - 1] for x in word)

    def multiply(self, x, y):
        w1, t1 = x
        w2, t2 = y
        return (reduce_free_word(w1 + self._twist(t1, w2)),
                self.torsion.add(t1, t2))

    def inverse(self, x):
        w, t = x
        nt = self.torsion.neg(t)
        back = tuple(-l for l in reversed(w))
        return (self._twist(nt, back), nt)

    def generators(self):
        """Name -> element for the free and torsion generators."""
        out = {}
        for j, name in enumerate(self.free_names, start=1):
            out[name] = ((j,), self.torsion.zero())
        for i, name in enumerate(self.torsion_names):
            t = [0] * len(self.torsion.orders)
            t[i] = 1
            out[name] = ((), tuple(t))
        return out

    def torsion_element(self, t):
        return ((), self.torsion.element(t))

    def is_torsion(self, x):
        return not x[0]

    def elements_to_length(self, depth):
        """All elements with free-word length <= depth (exact, no dedup)."""
        words = [()]
        frontier = [()]
        letters = [j for j in range(1, self.rank + 1)]
        letters += [-j for j in letters]
        for _ in range(depth):
            nxt = []
            for w in frontier:
                for x in letters:
                    if not w or w[-1] != -x:
                        nxt.append(w + (x,))
            words.extend(nxt)
            frontier = nxt
        for w in words:
            for t in self.torsion.elements():
                yield (w, t)

    def is_finite(self):
        return self.rank == 0

    def __repr__(self):
        return (f"LeafSymbolic(free={self.free_names}, "
                f"torsion={self.torsion.label()})")


# ---------------------------------------------------------------------------
# free products with an optional Z2 amalgam


class FreeProductModel:
    """Normal forms in K1 * K2, optionally amalgamated over an involution.

    An element is (syllables, pend): syllables alternate sides, each one a
    canonical coset representative of child/H (plain nontrivial elements
    when the amalgam is trivial), and pend marks a trailing amalgam factor.
    Coset representatives are the key-minimal choice among {g, g*u}, which
    makes the form canonical by the amalgamated-product normal form.
    """

    def __init__(self, left, right, amalgam=None):
        self.children = (left, right)
        self.amalgam = amalgam        # None or (u_left, u_right)
        if amalgam is not None:
            for side, u in enumerate(amalgam):
                child = self.children[side]
                if child.is_identity(u):
                    raise ValueError("amalgam element must be nontrivial")
                if not child.is_identity(child.multiply(u, u)):
                    raise ValueError("amalgam element must be an involution")

    def identity(self):
        return ((), 0)

    def is_identity(self, x):
        return x == ((), 0)

    def _coset_rep(self, side, g):
        """Decompose g = r * u^h with r the key-minimal representative."""
        u = self.amalgam[side]
        alt = self.children[side].multiply(g, u)
        if _element_key(alt) < _element_key(g):
            return alt, 1
        return g, 0

    def _fold(self, stream):
        out = []
        pend = 0
        for side, g in stream:
            child = self.children[side]
            if pend:
                g = child.multiply(self.amalgam[side], g)
                pend = 0
            if out and out[-1][0] == side:
                g = child.multiply(out.pop()[1], g)
            if child.is_identity(g):
                continue
            if self.amalgam is not None:
                g, pend = self._coset_rep(side, g)
                if child.is_identity(g):
                    continue
            out.append((side, g))
        return (tuple(out), pend)

    def _stream(self, x):
        syllables, pend = x
        for s in syllables:
            yield s
        if pend:
            yield (0, self.amalgam[0])

    def multiply(self, x, y):
        return self._fold(itertools.chain(self._stream(x), self._stream(y)))

    def inverse(self, x):
        syllables, pend = x
        stream = []
        if pend:
            stream.append((0, self.amalgam[0]))
        for side, g in reversed(syllables):
            stream.append((side, self.children[side].inverse(g)))
        return self._fold(stream)

    def embed(self, side, g):
        return self._fold([(side, g)])

    def generators(self):
        out = {}
        for side, child in enumerate(self.children):
            for name, g in child.generators().items():
                if name in out:
                    raise ValueError(f"duplicate generator name {name!r}")
                out[name] = self.embed(side, g)
        return out

    def __repr__(self):
        kind = "amalgamated" if self.amalgam else "free"
        return f"FreeProductModel({kind})"


class HnnModel:
    """Normal forms for the HNN shapes the toolkit constructs.

    Covered: trivial base with trivial edge (the group is Z), and a purely
    torsion abelian base with the full base as edge group and a stable
    letter acting trivially (the group is Z x T).  Anything else raises
    UnsupportedSymbolicError; geometric certificates are unaffected.
    """

    def __init__(self, base, stable_name, edge_is_full_base):
        self.base = base
        self.stable_name = stable_name
        if base is None:
            self.shape = "free"
        elif isinstance(base, LeafSymbolic) and base.rank == 0 \
                and edge_is_full_base:
            self.shape = "central"
        else:
            raise UnsupportedSymbolicError(
                "symbolic normal forms cover only trivial bases or full "
                "torsion edge groups with a commuting stable letter")

    def identity(self):
        if self.shape == "free":
            return 0
        return (0, self.base.identity())

    def is_identity(self, x):
        return x == self.identity()

    def multiply(self, x, y):
        if self.shape == "free":
            return x + y
        return (x[0] + y[0], self.base.multiply(x[1], y[1]))

    def inverse(self, x):
        if self.shape == "free":
            return -x
        return (-x[0], self.base.inverse(x[1]))

    def generators(self):
        if self.shape == "free":
            return {self.stable_name: 1}
        out = {name: (0, g) for name, g in self.base.generators().items()}
        if self.stable_name in out:
            raise ValueError(f"duplicate generator name {self.stable_name!r}")
        out[self.stable_name] = (1, self.base.identity())
        return out

    def __repr__(self):
        return f"HnnModel(shape={self.shape})"


def _element_key(x):
    """A total order key for nested canonical elements."""
    if isinstance(x, tuple):
        return (1, len(x), tuple(_element_key(v) for v in x))
    return (0, 0, x)


# ---------------------------------------------------------------------------
# construction-tree walks (duck-typed over node.kind)


def symbolic_model(tree):
    """Build the group model for a construction tree.

    Leaves carry their own LeafSymbolic; product nodes pair the child
    models, with the amalgam involution embedded on each side; HNN nodes
    use the covered shapes.
    """
    kind = tree.kind
    if kind == "leaf":
        return tree.group.symbolic
    if kind == "product":
        left = symbolic_model(tree.left)
        right = symbolic_model(tree.right)
        if tree.amalgam_elements is None:
            return FreeProductModel(left, right)
        return FreeProductModel(left, right, tree.amalgam_elements)
    if kind == "hnn":
        if tree.base is None:
            return HnnModel(None, tree.stable_name, False)
        base = symbolic_model(tree.base)
        return HnnModel(base, tree.stable_name, tree.edge_is_full_base)
    raise ValueError(f"unknown node kind {kind!r}")


def tree_leaves(tree):
    """Leaf nodes of the tree; composite leaves (groups built from their
    own sub-tree, like the B3 amalgams) are expanded into that sub-tree."""
    kind = tree.kind
    if kind == "leaf":
        inner = getattr(tree.group, "tree", None)
        if inner is not None:
            yield from tree_leaves(inner)
        else:
            yield tree
    elif kind == "product":
        yield from tree_leaves(tree.left)
        yield from tree_leaves(tree.right)
    elif kind == "hnn":
        if tree.base is not None:
            yield from tree_leaves(tree.base)
    else:
        raise ValueError(f"unknown node kind {kind!r}")


def euler_characteristic(tree):
    """Rational chi of the tree group.

    Free product over amalgam H: chi = chi_left + chi_right - chi(H);
    HNN over edge H: chi = chi_base - chi(H); chi(trivial) = 1 and
    chi(Z_m) = 1/m.  Leaves carry chi = (1 - rank)/index directly.
    """
    kind = tree.kind
    if kind == "leaf":
        return tree.group.chi
    if kind == "product":
        edge = Fraction(1, tree.amalgam_order)
        return euler_characteristic(tree.left) \
            + euler_characteristic(tree.right) - edge
    if kind == "hnn":
        edge = Fraction(1, tree.edge_order)
        base = Fraction(1) if tree.base is None \
            else euler_characteristic(tree.base)
        return base - edge
    raise ValueError(f"unknown node kind {kind!r}")


def tree_generators(tree):
    """Name -> (leaf or node info) for all generators in the tree."""
    out = {}
    for leaf in tree_leaves(tree):
        for name in leaf.group.generator_names:
            if name in out:
                raise ValueError(f"duplicate generator name {name!r}")
            out[name] = leaf
    if tree.kind == "hnn" and tree.base is not None:
        if tree.stable_name in out:
            raise ValueError(f"duplicate generator name {tree.stable_name!r}")
        out[tree.stable_name] = tree
    return out


def normal_form(tree, word):
    """Canonical form of a word given as (name, exponent) pairs.

    The empty form is exactly the identity.  Plain generator names are
    accepted as shorthand for exponent 1.
    """
    model = symbolic_model(tree)
    gens = model.generators()
    x = model.identity()
    for item in word:
        if isinstance(item, str):
            name, exp = item, 1
        else:
            name, exp = item
        if name not in gens:
            raise KeyError(f"unknown generator {name!r}")
        g = gens[name]
        if exp < 0:
            g = model.inverse(g)
            exp = -exp
        for _ in range(exp):
            x = model.multiply(x, g)
    return x


def is_identity_word(tree, word):
    model = symbolic_model(tree)
    return model.is_identity(normal_form(tree, word))


@dataclass
class EnumerationResult:
    """BFS listing of group elements by shortest word."""

    elements: dict
    exhausted: bool
    depth_completed: int

    def __iter__(self):
        return iter((self.elements, self.exhausted))


def enumerate_elements(model, depth, generators=None, max_count=None):
    """BFS over products of generators, deduplicated by normal form.

    elements maps each canonical element to a shortest word (tuple of
    (name, exp) letters); exhausted means the BFS closed before the depth
    bound, i.e. the generated group is finite and fully listed.  With
    max_count set, the walk stops after the last fully completed level
    that fits the budget; depth_completed records how far it got.
    """
    if generators is None:
        generators = model.generators()
    steps = []
    for name, g in generators.items():
        steps.append(((name, 1), g))
        steps.append(((name, -1), model.inverse(g)))
    elements = {model.identity(): ()}
    frontier = [(model.identity(), ())]
    exhausted = False
    depth_completed = 0
    for level in range(1, depth + 1):
        if max_count is not None and \
                len(elements) + len(frontier) * len(steps) > max_count:
            break
        nxt = []
        for x, word in frontier:
            for letter, g in steps:
                y = model.multiply(x, g)
                if y not in elements:
                    elements[y] = word + (letter,)
                    nxt.append((y, word + (letter,)))
        depth_completed = level
        if not nxt:
            exhausted = True
            depth_completed = depth
            break
        frontier = nxt
    return EnumerationResult(elements, exhausted, depth_completed)


# ---------------------------------------------------------------------------
# quotient maps and kernel rank


@dataclass
class QuotientMap:
    """Generator-name -> element of a finite abelian target group."""

    target: FiniteAbelianGroup
    images: dict

    def image_of(self, name):
        if name not in self.images:
            raise KeyError(f"unknown generator {name!r}")
        return self.images[name]

    def apply(self, word):
        total = self.target.zero()
        for item in word:
            if isinstance(item, str):
                name, exp = item, 1
            else:
                name, exp = item
            total = self.target.add(
                total, self.target.scale(exp, self.image_of(name)))
        return total

    def is_kernel_word(self, word):
        return self.apply(word) == self.target.zero()


def theta_apply(theta, word):
    return theta.apply(word)


def is_kernel_word(theta, word):
    return theta.is_kernel_word(word)


@dataclass
class RankReport:
    chi: Fraction
    order_h: int
    kernel_rank: int
    surjective: bool
    kernel_torsion_free: bool
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return self.surjective and self.kernel_torsion_free \
            and not self.problems

    def lines(self):
        out = [f"chi(K) = {self.chi}",
               f"|H| = {self.order_h}",
               f"kernel rank = {self.kernel_rank}",
               f"theta surjective: {'yes' if self.surjective else 'NO'}",
               "kernel torsion-free: "
               + ("yes" if self.kernel_torsion_free else "NO")]
        out.extend(f"problem: {p}" for p in self.problems)
        return out


def validate_theta(tree, theta):
    """Check theta against the tree's relations.

    Verifies: every generator has an image; torsion generators map to
    elements of compatible order; free generators inverted by some
    torsion element map to elements of order at most 2; amalgamated
    generators have equal images; theta is injective on every leaf's
    torsion subgroup (otherwise the kernel has torsion and cannot be
    free).  Returns (problems, torsion_free).
    """
    problems = []
    torsion_free = True
    H = theta.target
    for leaf in tree_leaves(tree):
        sym = leaf.group.symbolic
        names = leaf.group.generator_names
        for name in names:
            if name not in theta.images:
                problems.append(f"generator {name!r} has no image")
        if any(name not in theta.images for name in names):
            continue
        # torsion orders must be respected
        for i, tname in enumerate(sym.torsion_names):
            d = sym.torsion.orders[i]
            if d % H.element_order(theta.images[tname]) != 0:
                problems.append(
                    f"theta({tname}) has order not dividing {d}")
        # inverted free generators must land in 2-torsion
        for j, fname in enumerate(sym.free_names):
            inverted = any(row[j] < 0 for row in sym.action)
            img = theta.images[fname]
            if inverted and H.add(img, img) != H.zero():
                problems.append(
                    f"theta({fname}) must be 2-torsion: some torsion "
                    f"generator conjugates {fname} to its inverse")
        # injectivity on the leaf's torsion subgroup
        seen = {}
        for t in sym.torsion.elements():
            img = H.zero()
            for i, e in enumerate(t):
                img = H.add(
                    img, H.scale(e, theta.images[sym.torsion_names[i]]))
            if img in seen and seen[img] != t:
                torsion_free = False
                problems.append(
                    f"theta is not injective on the torsion of leaf "
                    f"{leaf.group.label}: kernel would contain torsion")
                break
            seen[img] = t
    problems.extend(_amalgam_theta_problems(tree, theta))
    return problems, torsion_free


def _amalgam_theta_problems(tree, theta):
    problems = []
    kind = tree.kind
    if kind == "product":
        if tree.amalgam_images is not None:
            img1 = theta.apply(tree.amalgam_images[0])
            img2 = theta.apply(tree.amalgam_images[1])
            if img1 != img2:
                problems.append("amalgamated generators have unequal images")
        problems.extend(_amalgam_theta_problems(tree.left, theta))
        problems.extend(_amalgam_theta_problems(tree.right, theta))
    elif kind == "hnn" and tree.base is not None:
        problems.extend(_amalgam_theta_problems(tree.base, theta))
    return problems


def kernel_rank(tree, theta, force=False):
    """RankReport for the kernel of theta on the tree group.

    kernel_rank = 1 - |H| * chi(K).  Refuses non-surjective theta unless
    force is set, in which case H is replaced by the image subgroup.
    """
    problems, torsion_free = validate_theta(tree, theta)
    H = theta.target
    images = [img for img in theta.images.values()]
    surjective = H.generated_by(images)
    order_h = H.order
    if not surjective:
        if not force:
            problems.append("theta is not surjective; use force to compute "
                            "against the image subgroup")
        order_h = len(H.subgroup(images))
    chi = euler_characteristic(tree)
    rank = 1 - order_h * chi
    if rank.denominator != 1:
        problems.append(f"kernel rank {rank} is not an integer")
        rank_int = -1
    else:
        rank_int = int(rank)
        if rank_int < 0:
            problems.append(f"kernel rank {rank_int} is negative")
    return RankReport(chi=chi, order_h=order_h, kernel_rank=rank_int,
                      surjective=surjective, kernel_torsion_free=torsion_free,
                      problems=problems)
