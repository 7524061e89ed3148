"""Limit set samples: nested word-image discs and fixed-point dust.

For a verified pairing system the limit set is approximated by the
ping-pong discs of all reduced words up to a depth: each word's disc
nests strictly inside its parent's, so the terminal discs cover the
limit set by shrinking closed discs, a numerical witness of total
disconnectedness.  Assembled trees carry per-certificate discs but no
global circle system, so they are sampled through the loxodromic fixed
points of enumerated elements instead.  Diameters are spherical
(chordal) throughout, since infinity may be a limit point.
"""

from dataclasses import dataclass

from .combination import GroupData
from .moebius import INF, TOL, classify, fixed_points
from .schottky import PairingSystem, count_reduced_words, letter_discs
from .sphere_geometry import disc_contains, disc_image

__all__ = ["LimitSetSample", "DisconnectednessReport", "sample",
           "disconnectedness_report", "render", "export_lines"]

CIRCLE_BUDGET = 10 ** 6


@dataclass(frozen=True)
class LimitSetSample:
    """Word-disc and fixed-point approximation of a limit set.

    discs holds (reduced word, SphereDisc) pairs in breadth-first order,
    words as tuples of signed generator indices; points holds projective
    fixed points (complex numbers or the infinity sentinel), first-seen
    order; max_diameter_by_depth[k-1] is the largest spherical diameter
    among the depth-k discs.
    """

    depth: int
    discs: tuple
    points: tuple
    max_diameter_by_depth: tuple

    @property
    def circles(self):
        return [(word, disc.circle) for word, disc in self.discs]

    @property
    def is_empty(self):
        return not self.discs and not self.points


@dataclass(frozen=True)
class DisconnectednessReport:
    """Nesting audit of a sample's disc tree."""

    depth: int
    checked: int
    violations: tuple
    max_terminal_diameter: float
    monotone: bool

    @property
    def ok(self):
        return not self.violations

    def lines(self):
        out = [f"depth {self.depth}: {self.checked} nested discs checked, "
               f"{len(self.violations)} violations"]
        for child, parent in self.violations[:10]:
            out.append(f"  disc of {_word_text(child)} leaves its parent "
                       f"{_word_text(parent)}")
        out.append("max terminal spherical diameter "
                   f"{self.max_terminal_diameter:.6e}")
        out.append("diameters non-increasing: "
                   + ("yes" if self.monotone else "NO"))
        return out


def _word_text(word):
    return " ".join(str(x) for x in word)


def _collect_fixed_points(m, out, seen, tol):
    if classify(m, tol).kind != "loxodromic":
        return
    for p in fixed_points(m, tol):
        key = "inf" if p is INF else (round(p.real, 9), round(p.imag, 9))
        if key not in seen:
            seen.add(key)
            out.append(p)


def _sample_pairing(system, depth, require_verified, tol, budget):
    discs_by_letter = letter_discs(system, tol, strict=require_verified)
    genus = system.genus
    if genus == 0:
        return LimitSetSample(depth, (), (), ())
    eff = depth
    while eff > 1 and count_reduced_words(genus, eff) > budget:
        eff -= 1
    letters = [x for j in range(1, genus + 1) for x in (j, -j)]
    gens = {x: system.generator(x) for x in letters}
    discs, points, maxdiam = [], [], []
    seen = set()
    frontier = [((x,), gens[x], discs_by_letter[x]) for x in letters]
    for level in range(1, eff + 1):
        if level > 1:
            nxt = []
            for word, m, _ in frontier:
                for y in letters:
                    if y != -word[-1]:
                        nxt.append((word + (y,), m * gens[y],
                                    disc_image(m, discs_by_letter[y])))
            frontier = nxt
        level_max = 0.0
        for word, m, disc in frontier:
            discs.append((word, disc))
            level_max = max(level_max, disc.circle.spherical_diameter())
            _collect_fixed_points(m, points, seen, tol)
        maxdiam.append(level_max)
    return LimitSetSample(eff, tuple(discs), tuple(points), tuple(maxdiam))


def _uncertified_nodes(node):
    problems = []
    kind = getattr(node, "kind", None)
    if kind in ("product", "hnn"):
        cert = node.certificate
        if cert is None:
            problems.append(f"{kind} node carries no certificate")
        elif not cert.ok:
            problems.append(f"{kind} node certificate has failures")
        children = (node.left, node.right) if kind == "product" \
            else (node.base,)
        for child in children:
            problems.extend(_uncertified_nodes(child))
    return problems


def _sample_elements(data, depth, tol, budget):
    enum = data.elements(depth, max_count=budget)
    points, seen = [], set()
    for _, _, m in enum.triples:
        _collect_fixed_points(m, points, seen, tol)
    return LimitSetSample(enum.depth_completed, (), tuple(points), ())


def sample(source, depth=8, require_verified=True, tol=TOL,
           circle_budget=CIRCLE_BUDGET):
    """Approximate the limit set of a pairing system, leaf, or tree.

    Pairing systems yield the full disc tree to the requested depth
    (capped by circle_budget) plus fixed points of all word maps.
    Basic groups with a standard pairing are sampled through it; other
    leaves and assembled trees yield fixed points only.  Uncertified
    trees and unverified pairings are rejected unless
    require_verified=False.
    """
    if isinstance(source, PairingSystem):
        return _sample_pairing(source, depth, require_verified, tol,
                               circle_budget)
    if hasattr(source, "pairing_system"):
        if source.schottky_names:
            system = source.pairing_system(verify=require_verified)
            return _sample_pairing(system, depth, require_verified, tol,
                                   circle_budget)
        # finite leaf: no loxodromic pairing, fixed points only
        return _sample_elements(GroupData.coerce(source), depth, tol,
                                circle_budget)
    node = source.tree if hasattr(source, "tree") else source
    if not hasattr(node, "kind"):
        raise TypeError(f"cannot sample a {type(source).__name__}")
    problems = _uncertified_nodes(node)
    if require_verified and problems:
        raise ValueError("uncertified tree rejected: " + problems[0])
    return _sample_elements(GroupData.from_node(node), depth, tol,
                            circle_budget)


def disconnectedness_report(sample, slack=1e-7):
    """Audit nesting of the disc tree and report terminal diameters.

    Every disc of a word of length >= 2 must sit inside its parent's
    closed disc, up to the stated slack.  Point-only samples audit
    vacuously.
    """
    if sample.depth < 2:
        raise ValueError("need a sample of depth >= 2")
    index = {word: disc for word, disc in sample.discs}
    violations = []
    checked = 0
    for word, disc in sample.discs:
        if len(word) < 2:
            continue
        checked += 1
        if not disc_contains(index[word[:-1]], disc, tol=slack):
            violations.append((word, word[:-1]))
    diam = sample.max_diameter_by_depth
    terminal = diam[-1] if diam else 0.0
    monotone = all(diam[k + 1] <= diam[k] + slack
                   for k in range(len(diam) - 1))
    return DisconnectednessReport(sample.depth, checked, tuple(violations),
                                  terminal, monotone)


def export_lines(sample):
    """Structured text: one line per disc (word, coefficients, diameter)
    and one per fixed point."""
    out = [f"depth {sample.depth}"]
    for word, disc in sample.discs:
        c = disc.circle
        out.append(f"disc {_word_text(word)} | "
                   f"A={c.A:.6e} B={c.B.real:.6e}{c.B.imag:+.6e}j "
                   f"C={c.C:.6e} side={disc.side:+d} | "
                   f"diam={c.spherical_diameter():.6e}")
    for p in sample.points:
        if p is INF:
            out.append("point inf")
        else:
            out.append(f"point {p.real:.6e}{p.imag:+.6e}j")
    return out


def _svg_header(width, height):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="0 0 {width:.6f} {height:.6f}">')


def render(sample, size=800.0, margin=0.06):
    """Deterministic vector image of a sample, as an SVG string.

    Discs are stroked circles colored by word length, fixed points are
    filled dots.  Boundary lines and the point at infinity have no
    planar image; they are tallied in a comment instead.  Identical
    samples and parameters produce identical bytes.
    """
    circles = []
    dots = []
    skipped = 0
    for word, disc in sample.discs:
        c = disc.circle
        if c.is_line():
            skipped += 1
            continue
        center, radius = c.center_radius()
        circles.append((len(word), center.real, center.imag, radius))
    for p in sample.points:
        if p is INF:
            skipped += 1
        else:
            dots.append((p.real, p.imag))
    if not circles and not dots:
        return "\n".join([_svg_header(size, size),
                          "  <!-- empty sample -->", "</svg>"]) + "\n"
    xs = [x - r for _, x, _, r in circles] + [x + r for _, x, _, r in
                                              circles] + [x for x, _ in dots]
    ys = [y - r for _, _, y, r in circles] + [y + r for _, _, y, r in
                                              circles] + [y for _, y in dots]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-12)
    scale = size * (1.0 - 2.0 * margin) / span
    pad = size * margin

    def sx(x):
        return (x - x0) * scale + pad

    def sy(y):
        return (y1 - y) * scale + pad

    width = (x1 - x0) * scale + 2.0 * pad
    height = (y1 - y0) * scale + 2.0 * pad
    stroke = size / 640.0
    out = [_svg_header(width, height)]
    if skipped:
        out.append(f"  <!-- {skipped} unbounded elements omitted -->")
    for level, x, y, r in circles:
        hue = (37 + 53 * (level - 1)) % 360
        out.append(f'  <circle cx="{sx(x):.6f}" cy="{sy(y):.6f}" '
                   f'r="{r * scale:.6f}" fill="none" '
                   f'stroke="hsl({hue},65%,38%)" '
                   f'stroke-width="{stroke:.6f}"/>')
    for x, y in dots:
        out.append(f'  <circle cx="{sx(x):.6f}" cy="{sy(y):.6f}" '
                   f'r="{size / 320.0:.6f}" fill="#1a1a1a"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
