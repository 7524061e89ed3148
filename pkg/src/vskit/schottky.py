"""Classical Schottky pairing systems and their ping-pong certificates.

A pairing system is a list of triples (C_j, C'_j, A_j): 2g circles that
bound a common region D of the sphere, with A_j mapping C_j onto C'_j
and throwing D off itself.  Reduced words in the pairing maps are
written as tuples of nonzero signed generator indices, +j for A_j and
-j for A_j^-1, with 1-based j.
"""

from dataclasses import dataclass, field

from .moebius import MoebiusMap, classify, fixed_points, is_identity_map, TOL
from . import sphere_geometry
from .sphere_geometry import SphereDisc, circles_equal, discs_same, disc_image


class DegeneratePairingError(ValueError):
    """A generator's fixed point lies on a pairing circle."""


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verified hypothesis.

    status is 'pass', 'bounded-pass' (checked only up to a word depth)
    or 'fail'; a failure carries a human-readable witness.
    """

    name: str
    status: str
    witness: str = ""
    depth: int | None = None

    @property
    def ok(self):
        return self.status in ("pass", "bounded-pass")


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, name, status, witness="", depth=None):
        self.checks.append(CheckResult(name, status, witness, depth))

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def first_witness(self):
        bad = self.failures()
        return bad[0].witness if bad else ""

    def lines(self):
        out = []
        for c in self.checks:
            line = f"{c.status.upper():12s} {c.name}"
            if c.depth is not None:
                line += f" (depth {c.depth})"
            if c.witness:
                line += f" -- {c.witness}"
            out.append(line)
        return out


class PairingSystem:
    """The data of a classical Schottky group of rank g."""

    def __init__(self, pairs):
        self.pairs = tuple((c, cp, m) for c, cp, m in pairs)
        self._discs = None

    @property
    def genus(self):
        return len(self.pairs)

    def generator(self, j):
        """The pairing map for 1-based index j; negative j for inverses."""
        if j > 0:
            return self.pairs[j - 1][2]
        return self.pairs[-j - 1][2].inverse()

    def all_circles(self):
        out = []
        for c, cp, _ in self.pairs:
            out.append(c)
            out.append(cp)
        return out


def _other_side_assignment(circles, tol):
    """For each circle, the sign of the side where all other circles sit.

    Returns (signs, problem) where problem is a witness string when the
    circles fail to bound a common region.
    """
    signs = []
    for i, ci in enumerate(circles):
        seen = set()
        for j, cj in enumerate(circles):
            if i == j:
                continue
            value = ci.eval(cj.a_point())
            if abs(value) <= tol:
                return None, f"circle {j} touches circle {i}"
            seen.add(1 if value > 0 else -1)
        if len(seen) > 1:
            return None, f"circles sit on both sides of circle {i}"
        signs.append(seen.pop() if seen else 1)
    return signs, ""


def verify_pairing(system, tol=TOL):
    """Machine-check the three classical Schottky conditions.

    (i) the 2g circles are pairwise disjoint and bound a common region D,
    (ii) each A_j maps C_j onto C'_j, (iii) each A_j maps the D-side of
    C_j onto the non-D side of C'_j, so A_j(D) misses D.  Generators must
    be loxodromic, and fixed points on pairing circles are rejected as
    degenerate input.
    """
    report = VerificationReport()
    circles = system.all_circles()
    for j, (c, cp, m) in enumerate(system.pairs, start=1):
        cls = classify(m, tol)
        if cls.kind == "loxodromic":
            report.add(f"generator {j} loxodromic", "pass")
            for p in fixed_points(m, tol):
                for k, circle in enumerate(circles):
                    if abs(circle.eval(p)) <= tol:
                        raise DegeneratePairingError(
                            f"fixed point of generator {j} lies on circle {k}")
        else:
            report.add(f"generator {j} loxodromic", "fail",
                       witness=f"classified {cls.kind}")

    disjoint = True
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            if not sphere_geometry.circles_disjoint(circles[i], circles[j], tol):
                report.add("circles pairwise disjoint", "fail",
                           witness=f"circles {i} and {j} are not disjoint")
                disjoint = False
    if disjoint:
        report.add("circles pairwise disjoint", "pass")

    signs = None
    if disjoint and circles:
        signs, problem = _other_side_assignment(circles, tol)
        if signs is None:
            report.add("circles bound a common region", "fail",
                       witness=problem)
        else:
            report.add("circles bound a common region", "pass")
    elif not circles:
        report.add("circles bound a common region", "pass")

    if signs is not None:
        # signs[k] is the sign of eval on the D side of circle k, and a
        # disc is the locus side*eval < 0, so side=+signs[k] cuts off
        # the non-D disc that ping-pong needs.
        discs = []
        for k, circle in enumerate(circles):
            discs.append(SphereDisc(circle, signs[k]))
        for i in range(len(discs)):
            for j in range(i + 1, len(discs)):
                if sphere_geometry.disc_relation(discs[i], discs[j], tol) != "disjoint":
                    report.add("paired discs pairwise disjoint", "fail",
                               witness=f"discs {i} and {j} meet")
                    signs = None
        if signs is not None:
            report.add("paired discs pairwise disjoint", "pass")

    for j, (c, cp, m) in enumerate(system.pairs, start=1):
        image = sphere_geometry.map_circle(m, c)
        if circles_equal(image, cp, tol):
            report.add(f"A_{j} maps C_{j} onto C'_{j}", "pass")
        else:
            report.add(f"A_{j} maps C_{j} onto C'_{j}", "fail",
                       witness=f"image is {image!r}")
            continue
        if signs is None:
            continue
        d_side = SphereDisc(c, -signs[2 * (j - 1)])       # the D side of C_j
        target = SphereDisc(cp, signs[2 * (j - 1) + 1])   # non-D side of C'_j
        if discs_same(disc_image(m, d_side), target, tol):
            report.add(f"A_{j} throws the common region into C'_{j}-disc",
                       "pass")
        else:
            report.add(f"A_{j} throws the common region into C'_{j}-disc",
                       "fail", witness="image disc is on the wrong side")

    if report.ok and signs is not None:
        system._discs = _letter_discs(system, signs)
    return report


def _letter_discs(system, signs):
    discs = {}
    for j in range(1, system.genus + 1):
        c, cp, _ = system.pairs[j - 1]
        discs[-j] = SphereDisc(c, signs[2 * (j - 1)])
        discs[j] = SphereDisc(cp, signs[2 * (j - 1) + 1])
    return discs


def _require_verified(system, tol):
    if system._discs is None:
        report = verify_pairing(system, tol)
        if not report.ok:
            raise ValueError("pairing system failed verification: "
                             + "; ".join(r.witness or r.name
                                         for r in report.failures()))
    return system._discs


def letter_discs(system, tol=TOL, strict=True):
    """Per-letter ping-pong target discs, keyed by signed index.

    strict=True requires the full verification to pass.  With
    strict=False only the side assignment must succeed, so deliberately
    broken systems can still be sampled to exhibit their violations;
    nothing is cached on the system in that case.
    """
    if strict:
        return dict(_require_verified(system, tol))
    if system._discs is not None:
        return dict(system._discs)
    signs, problem = _other_side_assignment(system.all_circles(), tol)
    if signs is None:
        raise DegeneratePairingError(problem)
    return _letter_discs(system, signs)


def reduce_word(letters):
    """Freely reduce a sequence of signed generator indices."""
    out = []
    for x in letters:
        if x == 0:
            raise ValueError("letters are nonzero signed indices")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def word_map(system, word):
    """The Moebius map of a reduced word."""
    m = MoebiusMap.identity()
    for letter in word:
        m = m * system.generator(letter)
    return m


def reduced_words(genus, depth):
    """All nonempty reduced words of length <= depth, in BFS order."""
    letters = []
    for j in range(1, genus + 1):
        letters.extend((j, -j))
    frontier = [(x,) for x in letters]
    for w in frontier:
        yield w
    for _ in range(depth - 1):
        nxt = []
        for w in frontier:
            for x in letters:
                if x != -w[-1]:
                    nxt.append(w + (x,))
        for w in nxt:
            yield w
        frontier = nxt


def count_reduced_words(genus, depth):
    """Number of nonempty reduced words of length <= depth."""
    if genus == 0 or depth <= 0:
        return 0
    total = 0
    level = 2 * genus
    for _ in range(depth):
        total += level
        level *= 2 * genus - 1
    return total


def ping_pong_disc(system, word, tol=TOL):
    """The disc guaranteed to contain the image of the common region.

    For a reduced word w = x1 x2 ... xn the disc is the image of the
    last letter's disc under the prefix x1 ... x(n-1); extending a word
    nests its disc strictly inside the shorter word's disc.
    """
    word = reduce_word(word)
    if not word:
        raise ValueError("empty word has no ping-pong disc")
    discs = _require_verified(system, tol)
    disc = discs[word[-1]]
    for letter in reversed(word[:-1]):
        disc = disc_image(system.generator(letter), disc)
    return disc


def is_nontrivial_to_depth(system, depth, tol=TOL):
    """Certify that no nonempty reduced word up to depth is the identity.

    Returns (ok, certificate) where the certificate records the number
    of words inspected and the first offending word, if any.
    """
    _require_verified(system, tol)
    checked = 0
    for word, m in _word_matrices(system, depth):
        checked += 1
        if is_identity_map(m, tol):
            return False, {"depth": depth, "words_checked": checked,
                           "witness": word}
    return True, {"depth": depth, "words_checked": checked, "witness": None}


def word_census(system, depth, tol=TOL):
    """Classification counts over all nonempty reduced words up to depth."""
    counts = {}
    for _, m in _word_matrices(system, depth):
        kind = classify(m, tol).kind
        counts[kind] = counts.get(kind, 0) + 1
    return counts


def _word_matrices(system, depth):
    genus = system.genus
    if genus == 0 or depth <= 0:
        return
    letters = []
    for j in range(1, genus + 1):
        letters.extend((j, -j))
    maps = {x: system.generator(x) for x in letters}
    frontier = [((x,), maps[x]) for x in letters]
    for item in frontier:
        yield item
    for _ in range(depth - 1):
        nxt = []
        for word, m in frontier:
            for x in letters:
                if x != -word[-1]:
                    nxt.append((word + (x,), m * maps[x]))
        for item in nxt:
            yield item
        frontier = nxt
