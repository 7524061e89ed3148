"""Combination engine: amalgamated free products and HNN extensions.

Groups are joined along disc certificates.  Every hypothesis is checked
by machine: exact disc geometry where possible (shared boundaries, image
circles), bounded word enumeration where not (precise invariance).  A
successful check is a certificate of inspection up to the stated depth,
not a proof; a failed check always carries a concrete witness.
"""

import cmath
from dataclasses import dataclass, field

from .moebius import MoebiusMap, classify, projectively_equal, is_identity_map
from .sphere_geometry import (SphereCircle, SphereDisc, circles_equal,
                              discs_same, disc_image, disc_relation,
                              map_circle)
from . import group_algebra
from .group_algebra import symbolic_model, enumerate_elements, tree_leaves


class CombinationError(ValueError):
    """A combination hypothesis failed; carries the failing report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class HypothesisReport:
    name: str
    status: str                    # "pass" | "bounded-pass" | "fail"
    witness: object = None
    depth: int = 0

    @property
    def ok(self):
        return self.status != "fail"

    def line(self):
        if self.status == "pass":
            return f"[exact-pass] {self.name}"
        if self.status == "bounded-pass":
            return f"[pass to depth {self.depth}] {self.name}"
        return f"[FAIL] {self.name}: witness {self.witness}"


@dataclass
class Certificate:
    reports: tuple
    depth: int
    discs: tuple = ()

    @property
    def ok(self):
        return all(r.ok for r in self.reports)

    def lines(self):
        return [r.line() for r in self.reports]


def format_word(word):
    """Human-readable form of a word of (name, exponent) pairs."""
    if not word:
        return "<identity>"
    parts = []
    for name, exp in word:
        parts.append(name if exp == 1 else f"{name}^{exp}")
    return " * ".join(parts)


# ---------------------------------------------------------------------------
# construction-tree nodes


class Leaf:
    kind = "leaf"

    def __init__(self, group, label=None):
        self.group = group
        self.label = label if label is not None else group.label

    def __repr__(self):
        return f"Leaf({self.label})"


class FreeProductNode:
    kind = "product"

    def __init__(self, left, right, amalgam, amalgam_order, amalgam_elements,
                 amalgam_images, certificate):
        self.left = left
        self.right = right
        self.amalgam = amalgam                  # None or (name_left, name_right)
        self.amalgam_order = amalgam_order      # 1 for the trivial amalgam
        self.amalgam_elements = amalgam_elements
        self.amalgam_images = amalgam_images
        self.certificate = certificate

    @property
    def label(self):
        if self.amalgam is None:
            tag = "free product"
        else:
            sides = ["*".join((s,) if isinstance(s, str) else s)
                     for s in self.amalgam]
            tag = f"amalgam over {sides[0]} ~ {sides[1]}"
        return f"({self.left.label}) * ({self.right.label}) [{tag}]"

    def __repr__(self):
        return f"FreeProductNode({self.label})"


class HnnNode:
    kind = "hnn"

    def __init__(self, base, stable_name, stable, edge_order,
                 edge_is_full_base, certificate):
        self.base = base                        # node or None (trivial base)
        self.stable_name = stable_name
        self.stable = stable
        self.edge_order = edge_order
        self.edge_is_full_base = edge_is_full_base
        self.certificate = certificate

    @property
    def label(self):
        inner = self.base.label if self.base is not None else "trivial"
        return f"HNN({inner}; stable {self.stable_name})"

    def __repr__(self):
        return f"HnnNode({self.label})"


def as_node(group_or_node):
    if hasattr(group_or_node, "kind"):
        return group_or_node
    return Leaf(group_or_node)


def collect_matrices(node, out=None):
    """Generator-name -> MoebiusMap over the whole tree."""
    if out is None:
        out = {}
    if node.kind == "leaf":
        for name, m in node.group.gens.items():
            if name in out:
                raise ValueError(f"duplicate generator name {name!r}")
            out[name] = m
    elif node.kind == "product":
        collect_matrices(node.left, out)
        collect_matrices(node.right, out)
    elif node.kind == "hnn":
        if node.base is not None:
            collect_matrices(node.base, out)
        if node.stable_name in out:
            raise ValueError(f"duplicate generator name {node.stable_name!r}")
        out[node.stable_name] = node.stable
    else:
        raise ValueError(f"unknown node kind {node.kind!r}")
    return out


def node_certificates(node):
    out = []
    if node.kind == "product":
        out.extend(node_certificates(node.left))
        out.extend(node_certificates(node.right))
        if node.certificate is not None:
            out.append(node.certificate)
    elif node.kind == "hnn":
        if node.base is not None:
            out.extend(node_certificates(node.base))
        if node.certificate is not None:
            out.append(node.certificate)
    return out


@dataclass
class EnumeratedElements:
    """(canonical element, word, matrix) triples from a bounded BFS."""

    triples: list
    exhausted: bool
    depth_completed: int

    def __iter__(self):
        return iter((self.triples, self.exhausted))


# elements beyond this stop a bounded sweep at the last full word length
ENUMERATION_BUDGET = 20000


class GroupData:
    """A group presented for checking: symbolic model plus matrices."""

    def __init__(self, model, matrices):
        self.model = model
        self.matrices = matrices

    @classmethod
    def from_node(cls, node):
        return cls(symbolic_model(node), collect_matrices(node))

    @classmethod
    def coerce(cls, source):
        if isinstance(source, cls):
            return source
        if hasattr(source, "kind"):
            return cls.from_node(source)
        # a BasicGroup-like object
        return cls(source.symbolic, dict(source.gens))

    def word_matrix(self, word):
        m = MoebiusMap.identity()
        for name, exp in word:
            m = m * self.matrices[name] ** exp
        return m

    def elements(self, depth, max_count=None):
        """EnumeratedElements over the group to the given depth.

        Matrices are built one multiplication per element by walking the
        shortest-word tree (BFS order guarantees each word's parent was
        already seen).
        """
        result = enumerate_elements(self.model, depth, max_count=max_count)
        by_word = {(): MoebiusMap.identity()}
        triples = []
        for elem, word in result.elements.items():
            if word:
                name, exp = word[-1]
                step = self.matrices[name] if exp > 0 \
                    else self.matrices[name].inverse()
                by_word[word] = by_word[word[:-1]] * step
            triples.append((elem, word, by_word[word]))
        return EnumeratedElements(triples, result.exhausted,
                                  result.depth_completed)


def _cyclic_closure(model, g, cap=64):
    """All powers of g as canonical elements, or None if not finite."""
    out = {model.identity(): 0}
    x = g
    k = 1
    while not model.is_identity(x):
        if k > cap:
            return None
        out[x] = k
        x = model.multiply(x, g)
        k += 1
    return out


def resolve_generator_word(K, spec):
    """A generator name, or tuple of names, as (display, matrix, element).

    Tuples denote the product of the named generators, so torsion
    elements that are not themselves generators (such as the product of
    two commuting involutions) can name a subgroup.
    """
    K = GroupData.coerce(K)
    names = (spec,) if isinstance(spec, str) else tuple(spec)
    if not names:
        raise KeyError("empty generator word")
    gens = K.model.generators()
    matrix = MoebiusMap.identity()
    elem = K.model.identity()
    for name in names:
        if name not in K.matrices:
            raise KeyError(f"unknown generator {name!r}")
        matrix = matrix * K.matrices[name]
        elem = K.model.multiply(elem, gens[name])
    return "*".join(names), matrix, elem


def check_precisely_invariant(X, H, K, depth=6):
    """Is the disc X precisely invariant under H in K, to the given depth?

    H is named by a generator of K, or a tuple of generator names whose
    product generates it (None for the trivial subgroup).  Every element
    of H must fix X as a set; every enumerated element outside H must
    move X off itself (open-disc disjointness, so tangency passes).
    Exhausting a finite group upgrades the outcome to an exact pass.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    K = GroupData.coerce(K)
    if H is None:
        name = "precise invariance"
        h_set = {K.model.identity(): 0}
    else:
        display, h_matrix, h_elem = resolve_generator_word(K, H)
        name = f"precise invariance under <{display}>"
        h_set = _cyclic_closure(K.model, h_elem)
        if h_set is None:
            raise group_algebra.UnsupportedSymbolicError(
                "precise invariance needs a finite cyclic (or trivial) H")
        for k in range(1, len(h_set)):
            image = disc_image(h_matrix ** k, X)
            if not discs_same(image, X):
                return HypothesisReport(
                    name, "fail",
                    witness=f"{display}^{k} does not fix the disc",
                    depth=depth)
    listed = K.elements(depth, max_count=ENUMERATION_BUDGET)
    for elem, word, matrix in listed.triples:
        if elem in h_set:
            continue
        if disc_relation(disc_image(matrix, X), X) == "meets":
            return HypothesisReport(
                name, "fail", witness=format_word(word),
                depth=listed.depth_completed)
    status = "pass" if listed.exhausted else "bounded-pass"
    return HypothesisReport(name, status, depth=listed.depth_completed)


def _element_order_in(model, g, cap=64):
    closure = _cyclic_closure(model, g, cap)
    return None if closure is None else max(len(closure), 1)


def _word_of_names(spec):
    names = (spec,) if isinstance(spec, str) else tuple(spec)
    return tuple((name, 1) for name in names)


def free_product(left, right, amalgam, B1, B2, depth=6):
    """Join two groups along complementary discs B1, B2 sharing boundary.

    amalgam is None for the plain free product, or a pair of generator
    names (one per side) whose matrices must agree projectively; either
    side may also be a tuple of names denoting their product, for
    torsion elements that are not generators themselves.  B1 must be
    precisely invariant under the amalgam in the left group and B2 in
    the right group.  Any failed hypothesis raises CombinationError with
    the failing report attached.
    """
    left = as_node(left)
    right = as_node(right)
    left_data = GroupData.from_node(left)
    right_data = GroupData.from_node(right)
    dupes = set(left_data.matrices) & set(right_data.matrices)
    if dupes:
        raise CombinationError(
            f"generator names shared across factors: {sorted(dupes)}")

    reports = []
    if discs_same(B2, B1.complement()):
        reports.append(HypothesisReport("B1, B2 complementary discs with "
                                        "common boundary", "pass"))
    else:
        report = HypothesisReport(
            "B1, B2 complementary discs with common boundary", "fail",
            witness="B2 is not the complement of B1")
        raise CombinationError(report.line(), report)

    amalgam_order = 1
    amalgam_elements = None
    amalgam_images = None
    h_left = h_right = None
    if amalgam is not None:
        h_left, h_right = amalgam
        try:
            disp_l, m_left, e_left = resolve_generator_word(left_data, h_left)
        except KeyError as err:
            raise CombinationError(f"left amalgam: {err.args[0]}")
        try:
            disp_r, m_right, e_right = resolve_generator_word(right_data,
                                                              h_right)
        except KeyError as err:
            raise CombinationError(f"right amalgam: {err.args[0]}")
        if not projectively_equal(m_left, m_right):
            report = HypothesisReport(
                "amalgamated generators agree as matrices", "fail",
                witness=f"{disp_l} and {disp_r} differ")
            raise CombinationError(report.line(), report)
        order_left = _element_order_in(left_data.model, e_left)
        order_right = _element_order_in(right_data.model, e_right)
        if order_left is None or order_left != order_right:
            report = HypothesisReport(
                "amalgamated generators have equal finite order", "fail",
                witness=f"orders {order_left} vs {order_right}")
            raise CombinationError(report.line(), report)
        amalgam_order = order_left
        amalgam_elements = (e_left, e_right)
        amalgam_images = (_word_of_names(h_left), _word_of_names(h_right))
        reports.append(HypothesisReport(
            "amalgamated generators agree (matrices, order "
            f"{amalgam_order})", "pass"))

    r1 = check_precisely_invariant(B1, h_left, left_data, depth)
    r1.name = "B1 " + r1.name + " in left factor"
    reports.append(r1)
    if not r1.ok:
        raise CombinationError(r1.line(), r1)
    r2 = check_precisely_invariant(B2, h_right, right_data, depth)
    r2.name = "B2 " + r2.name + " in right factor"
    reports.append(r2)
    if not r2.ok:
        raise CombinationError(r2.line(), r2)

    certificate = Certificate(tuple(reports), depth, (B1, B2))
    return FreeProductNode(left, right, amalgam, amalgam_order,
                           amalgam_elements, amalgam_images, certificate)


def uncertified_free_product(left, right):
    """A trivial-amalgam product node without hypothesis checks.

    Used for bulk symbolic work (rank sweeps) where only chi and theta
    matter; certificate is None so downstream consumers can tell.
    """
    return FreeProductNode(as_node(left), as_node(right), None, 1,
                           None, None, None)


def hnn_extension(base, A, B1, B2, H1=None, H2=None, depth=6,
                  stable_name="stable"):
    """Adjoin a stable letter A throwing disc B1's complement across B2.

    Hypotheses checked: A loxodromic; A maps the boundary of B1 onto the
    boundary of B2 with A(B1) on the far side of B2; closed B1, B2
    disjoint; A conjugates H1 to H2 (cyclic subgroups of the base, named
    by generators); each B_j precisely invariant under H_j in the base;
    no base word to the given depth drags closed B1 onto closed B2.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    base_node = as_node(base) if base is not None else None
    base_data = GroupData.from_node(base_node) if base_node else None
    if base_data and stable_name in base_data.matrices:
        raise CombinationError(
            f"stable letter name {stable_name!r} already used in the base")

    reports = []
    kind = classify(A)
    if kind.kind != "loxodromic":
        report = HypothesisReport("stable letter is loxodromic", "fail",
                                  witness=f"classified {kind.kind}")
        raise CombinationError(report.line(), report)
    reports.append(HypothesisReport("stable letter is loxodromic", "pass"))

    sigma2 = map_circle(A, B1.circle)
    if circles_equal(sigma2, B2.circle):
        reports.append(HypothesisReport("A(Sigma1) = Sigma2", "pass"))
    else:
        report = HypothesisReport(
            "A(Sigma1) = Sigma2", "fail",
            witness=f"A(Sigma1) = {sigma2!r}, Sigma2 = {B2.circle!r}")
        raise CombinationError(report.line(), report)

    if discs_same(disc_image(A, B1), B2.complement()):
        reports.append(HypothesisReport("A(B1) disjoint from B2", "pass"))
    else:
        report = HypothesisReport(
            "A(B1) disjoint from B2", "fail",
            witness="A maps B1 onto B2 (wrong side)")
        raise CombinationError(report.line(), report)

    relation = disc_relation(B1, B2)
    if relation == "disjoint":
        reports.append(HypothesisReport("closed B1, B2 disjoint", "pass"))
    else:
        report = HypothesisReport(
            "closed B1, B2 disjoint", "fail",
            witness=f"discs {relation}: B1 = {B1!r}, B2 = {B2!r}")
        raise CombinationError(report.line(), report)

    edge_order = 1
    edge_is_full_base = base_node is None
    if (H1 is None) != (H2 is None):
        raise CombinationError("H1 and H2 must both be given or both omitted")
    if H1 is not None:
        if base_data is None:
            raise CombinationError("edge groups need a nontrivial base")
        for name in (H1, H2):
            if name not in base_data.matrices:
                raise CombinationError(f"unknown edge generator {name!r}")
        m1 = base_data.matrices[H1]
        m2 = base_data.matrices[H2]
        order = _element_order_in(base_data.model,
                                  base_data.model.generators()[H1])
        order2 = _element_order_in(base_data.model,
                                   base_data.model.generators()[H2])
        if order is None or order != order2:
            raise CombinationError(
                f"edge generators must have equal finite order, got "
                f"{order} vs {order2}")
        edge_order = order
        conj = A.inverse() * m2 * A
        if not any(projectively_equal(conj, m1 ** k)
                   for k in range(1, order + 1) if _coprime(k, order)):
            report = HypothesisReport(
                "A^-1 H2 A = H1", "fail",
                witness=f"A^-1 {H2} A is not a generator of <{H1}>")
            raise CombinationError(report.line(), report)
        reports.append(HypothesisReport("A^-1 H2 A = H1", "pass"))

    if base_data is not None:
        r1 = check_precisely_invariant(B1, H1, base_data, depth)
        r1.name = "B1 " + r1.name + " in base"
        reports.append(r1)
        if not r1.ok:
            raise CombinationError(r1.line(), r1)
        r2 = check_precisely_invariant(B2, H2, base_data, depth)
        r2.name = "B2 " + r2.name + " in base"
        reports.append(r2)
        if not r2.ok:
            raise CombinationError(r2.line(), r2)

        listed = base_data.elements(depth, max_count=ENUMERATION_BUDGET)
        sweep = HypothesisReport("no base word drags closed B1 onto "
                                 "closed B2", "bounded-pass",
                                 depth=listed.depth_completed)
        for elem, word, matrix in listed.triples:
            if disc_relation(disc_image(matrix, B1), B2) != "disjoint":
                sweep = HypothesisReport(
                    sweep.name, "fail", witness=format_word(word),
                    depth=listed.depth_completed)
                break
        else:
            if listed.exhausted:
                sweep = HypothesisReport(sweep.name, "pass", depth=depth)
        reports.append(sweep)
        if not sweep.ok:
            raise CombinationError(sweep.line(), sweep)

        # symbolic coverage: stable letter commuting with a fully torsion
        # base whose torsion equals the edge group
        model = base_data.model
        if H1 is not None and getattr(model, "rank", None) == 0:
            full = _cyclic_closure(model, model.generators()[H1])
            size = 1
            for d in model.torsion.orders:
                size *= d
            commutes = all(projectively_equal(A * m, m * A)
                           for m in base_data.matrices.values())
            edge_is_full_base = (full is not None and len(full) == size
                                 and commutes)

    certificate = Certificate(tuple(reports), depth, (B1, B2))
    return HnnNode(base_node, stable_name, A, edge_order,
                   edge_is_full_base, certificate)


def _coprime(a, b):
    while b:
        a, b = b, a % b
    return a == 1


# ---------------------------------------------------------------------------
# assembly


@dataclass
class AssembledGroup:
    tree: object
    generators: dict
    relations: tuple
    certificates: tuple
    model: object = field(repr=False, default=None)

    def word_matrix(self, word):
        m = MoebiusMap.identity()
        for name, exp in word:
            m = m * self.generators[name] ** exp
        return m

    def elements(self, depth):
        data = GroupData(self.model, self.generators)
        return data.elements(depth)

    def summary_lines(self):
        out = [f"generators: {' '.join(self.generators)}"]
        out.append(f"relations: {len(self.relations)}")
        for rel in self.relations:
            out.append(f"  {format_word(rel)} = 1")
        checks = [r for cert in self.certificates for r in cert.reports]
        out.append(f"certificates: {len(checks)} checks")
        for r in checks:
            out.append(f"  {r.line()}")
        return out


def _leaf_relations(group):
    """Finite-order, commutation, and inversion relations of one leaf."""
    sym = group.symbolic
    rels = []
    for i, tname in enumerate(sym.torsion_names):
        rels.append(((tname, sym.torsion.orders[i]),))
    for i in range(len(sym.torsion_names)):
        for j in range(i + 1, len(sym.torsion_names)):
            t1, t2 = sym.torsion_names[i], sym.torsion_names[j]
            rels.append(((t1, 1), (t2, 1), (t1, -1), (t2, -1)))
    for i, tname in enumerate(sym.torsion_names):
        for j, fname in enumerate(sym.free_names):
            sign = sym.action[i][j]
            if sign > 0:
                rels.append(((tname, 1), (fname, 1), (tname, -1), (fname, -1)))
            else:
                rels.append(((tname, 1), (fname, 1), (tname, -1), (fname, 1)))
    return rels


def _tree_relations(node):
    rels = []
    if node.kind == "leaf":
        inner = getattr(node.group, "tree", None)
        if inner is not None:
            rels.extend(_tree_relations(inner))
        else:
            rels.extend(_leaf_relations(node.group))
    elif node.kind == "product":
        rels.extend(_tree_relations(node.left))
        rels.extend(_tree_relations(node.right))
        if node.amalgam is not None:
            left_word, right_word = node.amalgam_images
            inverted = tuple((name, -exp) for name, exp
                             in reversed(right_word))
            rels.append(left_word + inverted)
    elif node.kind == "hnn":
        if node.base is not None:
            rels.extend(_tree_relations(node.base))
            if node.edge_is_full_base:
                for name in collect_matrices(node.base):
                    rels.append(((node.stable_name, 1), (name, 1),
                                 (node.stable_name, -1), (name, -1)))
    return rels


def assemble(tree):
    """Flatten a certified tree into generators, relations, certificates."""
    tree = as_node(tree)
    generators = collect_matrices(tree)
    relations = tuple(_tree_relations(tree))
    certificates = tuple(node_certificates(tree))
    model = symbolic_model(tree)
    return AssembledGroup(tree=tree, generators=generators,
                          relations=relations, certificates=certificates,
                          model=model)


# ---------------------------------------------------------------------------
# auto-placement helpers


def station_frame(x, scale, pull=8.0, angle=1.0):
    """Moebius map carrying a leaf's standard geometry near the real point x.

    The leaf's fixed points and pairing circles live in |z| <= scale with
    axes reaching infinity, so the frame first compactifies through
    z -> z / (z - P) with P = pull * scale * e^(i angle), landing
    everything (infinity included) within distance 1 + 2/(pull - 1) of x
    (9/7 for the default pull).  Separator half-planes pull back to small
    discs hugging P; placing P off every axis and orbit ray of the
    standard types (generic angle) keeps those discs wandering under the
    leaf, with no depth at which a loxodromic orbit sweeps a disc
    across P.
    """
    if scale <= 0 or pull <= 1:
        raise ValueError("scale must be positive and pull > 1")
    P = pull * scale * cmath.exp(1j * angle)
    compactify = MoebiusMap(1.0, 0.0, 1.0, -P)
    carry = MoebiusMap(2.0, x - 1.0, 0.0, 1.0)
    return carry * compactify


def station_boundary(x):
    """The open right half-plane Re z > x as a separating disc."""
    circle = SphereCircle.from_line(complex(x, 0.0), complex(x, 1.0))
    probe = complex(x + 1.0, 0.0)
    return SphereDisc(circle, -1 if circle.eval(probe) > 0 else 1)


class PlacementChain:
    """Assemble leaf groups left to right along the real axis.

    Each appended group is conjugated into its own station; stations are
    separated by vertical lines at gap midpoints and joined by trivial
    free products.  When a combination certificate fails, the gap doubles
    (up to max_retries) before giving up.  certify=False skips all
    hypothesis checks and never retries (bulk symbolic work).
    """

    def __init__(self, spacing=3.0, depth=6, certify=True, pull=8.0,
                 max_retries=5):
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        self.spacing = float(spacing)
        self.depth = depth
        self.certify = certify
        self.pull = pull
        self.max_retries = max_retries
        self.node = None
        self.groups = []
        self.right_edge = 0.0

    def _placed(self, group, x, attempt=0):
        frame = station_frame(x, group.standard_scale(), self.pull,
                              angle=1.0 + 0.7 * attempt)
        return group.conjugated_by(frame)

    def append(self, group):
        """Place `group` at the next station and return the new tree."""
        if self.node is None:
            placed = self._placed(group, 0.0)
            self.node = Leaf(placed)
            self.groups.append(placed)
            self.right_edge = 0.0
            return self.node
        if not self.certify:
            x = self.right_edge + 2.0 * self.spacing
            placed = self._placed(group, x)
            self.node = uncertified_free_product(self.node, Leaf(placed))
            self.groups.append(placed)
            self.right_edge = x
            return self.node
        last_error = None
        for attempt in range(self.max_retries + 1):
            gap = self.spacing * (2.0 ** attempt)
            x = self.right_edge + 2.0 * gap
            placed = self._placed(group, x, attempt)
            B1 = station_boundary(self.right_edge + gap)
            try:
                node = free_product(self.node, Leaf(placed), None,
                                    B1, B1.complement(), self.depth)
            except CombinationError as err:
                last_error = err
                continue
            self.node = node
            self.groups.append(placed)
            self.right_edge = x
            return node
        raise CombinationError(
            f"placement failed for {getattr(group, 'label', group)!r} "
            f"after {self.max_retries + 1} attempts: {last_error}")


def chain_leaves(groups, spacing=3.0, depth=6, certify=True):
    """Place the groups along the real axis; returns the final tree."""
    chain = PlacementChain(spacing=spacing, depth=depth, certify=certify)
    node = None
    for group in groups:
        node = chain.append(group)
    if node is None:
        raise ValueError("at least one group required")
    return node
