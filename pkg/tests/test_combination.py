"""Combination certificates: precise invariance, products, HNN, placement."""

import cmath
from fractions import Fraction

import pytest

from vskit.moebius import MoebiusMap, INF, is_identity_map, projectively_equal
from vskit.sphere_geometry import SphereCircle, SphereDisc
from vskit.combination import (CombinationError, Leaf, GroupData,
                               check_precisely_invariant,
                               resolve_generator_word, free_product,
                               uncertified_free_product, hnn_extension,
                               assemble, node_certificates, format_word,
                               station_frame, station_boundary,
                               PlacementChain, chain_leaves)
from vskit.group_algebra import (euler_characteristic, is_identity_word,
                                 symbolic_model)
from vskit.basic_groups import make_basic


def _disc(center, radius, inside=True):
    circle = SphereCircle.from_center_radius(center, radius)
    probe = complex(center) + 0.5 * radius
    side = 1 if circle.eval(probe) < 0 else -1
    return SphereDisc(circle, side if inside else -side)


# ---------------------------------------------------------------------------
# precise invariance


def test_precise_invariance_exact_in_finite_group():
    t3 = make_basic("T3")
    report = check_precisely_invariant(_disc(0, 0.5), "U", t3)
    assert report.status == "pass"
    assert report.ok


def test_precise_invariance_bounded_in_infinite_group():
    t2 = make_basic("T2", lam=4.0)
    report = check_precisely_invariant(_disc(1.0, 0.25), None, t2, depth=4)
    assert report.status == "bounded-pass"
    assert report.depth == 4


def test_precise_invariance_failure_names_witness():
    t2 = make_basic("T2", lam=4.0)
    report = check_precisely_invariant(_disc(0, 2.0), None, t2)
    assert report.status == "fail"
    assert "L" in report.witness


def test_precise_invariance_under_product_subgroup():
    # in T5 the involution U*V fixes +-i; an Apollonius disc around i
    # that is narrow enough stays clear of the A-orbit
    t5 = make_basic("T5", lam=4.0)
    X = _disc(17j / 15, 8.0 / 15)
    report = check_precisely_invariant(X, ("U", "V"), t5, depth=5)
    assert report.ok
    # the same disc is not U-invariant
    report = check_precisely_invariant(X, "U", t5, depth=3)
    assert report.status == "fail"
    assert "does not fix" in report.witness


def test_resolve_generator_word():
    t5 = make_basic("T5", lam=4.0)
    display, matrix, elem = resolve_generator_word(t5, ("U", "V"))
    assert display == "U*V"
    assert projectively_equal(matrix, t5.gens["U"] * t5.gens["V"])
    with pytest.raises(KeyError):
        resolve_generator_word(t5, "X")
    with pytest.raises(KeyError):
        resolve_generator_word(t5, ())


# ---------------------------------------------------------------------------
# free products


def _pushed_t3(sigma):
    push = MoebiusMap(sigma * sigma, 0, 0, 1)
    return make_basic("T3", prefix="b.").conjugated_by(push)


def test_amalgamated_free_product_of_two_t3():
    left = make_basic("T3", prefix="a.")
    right = _pushed_t3(2.0)                 # b.V becomes z -> 16/z
    B1 = _disc(0, 2.0, inside=False)
    node = free_product(Leaf(left), Leaf(right), ("a.U", "b.U"),
                        B1, B1.complement())
    assert node.amalgam_order == 2
    assert node.certificate.ok
    assert "amalgam over a.U ~ b.U" in node.label
    assert euler_characteristic(node) == 0
    assert is_identity_word(node, [("a.U", 1), ("b.U", 1)])
    assert not is_identity_word(node, [("a.V", 1), ("b.V", 1)])


def test_amalgam_identification_relation_is_recorded():
    left = make_basic("T3", prefix="a.")
    right = _pushed_t3(2.0)
    B1 = _disc(0, 2.0, inside=False)
    node = free_product(Leaf(left), Leaf(right), ("a.U", "b.U"),
                        B1, B1.complement())
    assembled = assemble(node)
    assert (("a.U", 1), ("b.U", -1)) in assembled.relations
    assert any("exact-pass" in line for line in assembled.summary_lines())


def test_free_product_rejects_shared_names():
    left = make_basic("T3", prefix="a.")
    right = make_basic("T3", prefix="a.")
    B1 = _disc(0, 2.0, inside=False)
    with pytest.raises(CombinationError) as err:
        free_product(Leaf(left), Leaf(right), None, B1, B1.complement())
    assert "shared across factors" in str(err.value)


def test_free_product_requires_complementary_discs():
    left = make_basic("T3", prefix="a.")
    right = _pushed_t3(2.0)
    with pytest.raises(CombinationError) as err:
        free_product(Leaf(left), Leaf(right), None,
                     _disc(0, 2.0, inside=False), _disc(0, 1.9))
    assert "complement" in str(err.value)


def test_free_product_rejects_mismatched_amalgam_matrices():
    left = make_basic("T3", prefix="a.")
    shifted = make_basic("T3", prefix="b.").conjugated_by(
        MoebiusMap(1, 5, 0, 1))
    B1 = _disc(0, 2.0, inside=False)
    with pytest.raises(CombinationError) as err:
        free_product(Leaf(left), Leaf(shifted), ("a.U", "b.U"),
                     B1, B1.complement())
    assert "differ" in str(err.value)


def test_free_product_reports_invariance_failure_with_witness():
    left = make_basic("T3", prefix="a.")
    right = _pushed_t3(2.0)
    B1 = _disc(0, 0.4, inside=False)        # a.V drags it onto itself
    with pytest.raises(CombinationError) as err:
        free_product(Leaf(left), Leaf(right), ("a.U", "b.U"),
                     B1, B1.complement())
    assert err.value.report is not None
    assert err.value.report.status == "fail"


# ---------------------------------------------------------------------------
# HNN extensions


def test_hnn_extension_of_rotation_group():
    base = Leaf(make_basic("T1", n=3, prefix="e."))
    A = MoebiusMap(2, 0, 0, 0.5)            # z -> 4z commutes with e.E
    node = hnn_extension(base, A, _disc(0, 0.5), _disc(0, 2.0, inside=False),
                         H1="e.E", H2="e.E", stable_name="e.A")
    assert node.edge_order == 3
    assert node.edge_is_full_base
    assert node.certificate.ok
    assert all(r.status == "pass" for r in node.certificate.reports)
    assert euler_characteristic(node) == 0
    assert is_identity_word(
        node, [("e.A", 1), ("e.E", 1), ("e.A", -1), ("e.E", -1)])
    assembled = assemble(node)
    assert any(len(rel) == 4 and rel[0][0] == "e.A"
               for rel in assembled.relations)


def test_hnn_with_trivial_base_is_z():
    node = hnn_extension(None, MoebiusMap(2, 0, 0, 0.5),
                         _disc(0, 0.5), _disc(0, 2.0, inside=False),
                         stable_name="t")
    assert euler_characteristic(node) == 0
    model = symbolic_model(node)
    g = model.generators()["t"]
    x = model.multiply(g, g)
    assert not model.is_identity(x)


def test_hnn_rejects_elliptic_stable_letter():
    base = Leaf(make_basic("T1", n=3, prefix="e."))
    E4 = make_basic("T1", n=4, prefix="x.").gens["x.E"]
    with pytest.raises(CombinationError) as err:
        hnn_extension(base, E4, _disc(0, 0.5), _disc(0, 2.0, inside=False),
                      H1="e.E", H2="e.E", stable_name="e.A")
    assert "loxodromic" in str(err.value)


def test_hnn_rejects_meeting_discs():
    base = Leaf(make_basic("T1", n=3, prefix="e."))
    A = MoebiusMap(0.8, 0, 0, 1)            # contracts |z|<2.5 onto |z|<2
    with pytest.raises(CombinationError) as err:
        hnn_extension(base, A, _disc(0, 2.5), _disc(0, 2.0, inside=False),
                      H1="e.E", H2="e.E", stable_name="e.A")
    assert "closed B1, B2 disjoint" in str(err.value)


def test_hnn_checks_edge_conjugation():
    # z -> 4z conjugates V to 1/(16z), which generates neither <U> nor <V>
    base = Leaf(make_basic("T3"))
    A = MoebiusMap(2, 0, 0, 0.5)
    with pytest.raises(CombinationError) as err:
        hnn_extension(base, A, _disc(0, 0.5), _disc(0, 2.0, inside=False),
                      H1="U", H2="V", stable_name="s")
    assert "A^-1 H2 A = H1" in str(err.value)


def test_hnn_rejects_stable_name_collision():
    base = Leaf(make_basic("T1", n=3))
    with pytest.raises(CombinationError) as err:
        hnn_extension(base, MoebiusMap(2, 0, 0, 0.5),
                      _disc(0, 0.5), _disc(0, 2.0, inside=False),
                      H1="E", H2="E", stable_name="E")
    assert "already used" in str(err.value)


# ---------------------------------------------------------------------------
# placement


def test_station_frame_compactifies_the_leaf():
    phi = station_frame(5.0, 2.0)
    assert abs(phi(0.0) - 4.0) < 1e-12
    assert abs(phi(INF) - 6.0) < 1e-12
    # everything in |z| <= scale lands within 1 + 2/(pull-1) of x
    bound = 1.0 + 2.0 / 7.0
    for k in range(12):
        z = 2.0 * cmath.exp(1j * cmath.pi * k / 6.0)
        assert abs(phi(z) - 5.0) <= bound + 1e-9
    for k in range(8):
        z = 0.5 * cmath.exp(1j * cmath.pi * k / 4.0)
        assert abs(phi(z) - 5.0) <= bound + 1e-9


def test_station_frame_validation():
    with pytest.raises(ValueError):
        station_frame(0.0, -1.0)
    with pytest.raises(ValueError):
        station_frame(0.0, 1.0, pull=0.5)


def test_station_boundary_is_right_half_plane():
    D = station_boundary(3.0)
    assert D.contains(4.0)
    assert not D.contains(2.0)
    assert D.complement().contains(2.0)


def test_placement_chain_positions_and_retry():
    chain = PlacementChain()
    chain.append(make_basic("T2", lam=4.0, prefix="p."))
    assert chain.right_edge == 0.0
    chain.append(make_basic("T2", lam=1.5, prefix="s."))
    # the slow multiplier fails at gap 3 and succeeds after one doubling
    assert chain.right_edge == 12.0
    assert chain.node.certificate.ok


def test_placement_chain_six_leaf_mix():
    groups = [make_basic("T2", lam=2.0, prefix="p1."),
              make_basic("T1", n=7, prefix="p2."),
              make_basic("T5", lam=4.0, prefix="p3."),
              make_basic("T2", lam=1.5, prefix="p4."),
              make_basic("T4", n=3, lam=2.0, prefix="p5."),
              make_basic("T6", lam1=30.0, lam2=4.0, prefix="p6.")]
    chain = PlacementChain()
    node = None
    for g in groups:
        node = chain.append(g)
    assert chain.right_edge == 60.0
    assert euler_characteristic(node) == Fraction(-143, 28)
    reports = [r for cert in node_certificates(node) for r in cert.reports]
    assert len(reports) == 15
    assert all(r.ok for r in reports)
    # wide assemblies hit the enumeration budget; the certificate says so
    assert any("pass to depth 3" in r.line() for r in reports)


def test_placement_chain_uncertified_mode():
    groups = [make_basic("T1", n=3, prefix=f"c{k}.") for k in range(4)]
    node = chain_leaves(groups, certify=False)
    assert node.certificate is None
    assert euler_characteristic(node) == Fraction(4, 3) - 3


def test_placement_respects_rotation_groups():
    node = chain_leaves([make_basic("T1", n=24, prefix="r1."),
                         make_basic("T1", n=36, prefix="r2.")])
    reports = [r for cert in node_certificates(node) for r in cert.reports]
    assert all(r.ok for r in reports)
    assert euler_characteristic(node) == \
        Fraction(1, 24) + Fraction(1, 36) - 1


def test_chain_input_validation():
    with pytest.raises(ValueError):
        PlacementChain(spacing=0.0)
    with pytest.raises(ValueError):
        chain_leaves([])


# ---------------------------------------------------------------------------
# assembled groups stay faithful and well-conditioned


def test_assembled_words_are_faithful_to_depth_three():
    groups = [make_basic("T3", prefix="a."),
              make_basic("T2", lam=4.0, prefix="b."),
              make_basic("T1", n=3, prefix="c.")]
    node = chain_leaves(groups)
    assembled = assemble(node)
    model = assembled.model
    listed = assembled.elements(3)
    seen = 0
    for elem, word, matrix in listed.triples:
        if not model.is_identity(elem):
            assert not is_identity_map(matrix), format_word(word)
            seen += 1
    assert seen > 100


def test_enumeration_budget_reports_honest_depth():
    groups = [make_basic("T3", prefix="a."),
              make_basic("T2", lam=4.0, prefix="b."),
              make_basic("T1", n=3, prefix="c.")]
    node = chain_leaves(groups)
    data = GroupData.from_node(node)
    listed = data.elements(6, max_count=500)
    assert not listed.exhausted
    assert 1 <= listed.depth_completed < 6
    assert len(listed.triples) <= 500
