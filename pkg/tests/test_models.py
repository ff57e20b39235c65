from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from folmmp import fixtures as fx
from folmmp.foliation import FoliatedPair, ToricFoliation
from folmmp.mmp import MinimalModel, NotLC, Seeded, StepKind, run_mmp
from folmmp.models import (ModelGraph, ModelNode, NotAmple, NotSameGraph, cone_bound_audit, enumerate_models,
                           flop_connect, geography)
from folmmp.polyhedral import Fan
from folmmp.toric import ToricDivisor, intersection_number, is_nef


def test_atiyah_has_single_minimal_model(atiyah):
    f, pair = atiyah
    g = enumerate_models(f, pair)
    assert len(g.nodes) == 1
    assert g.nodes[0].fan.same_as(fx.atiyah_delta2())
    assert [s.kind for s in g.nodes[0].provenance] == [StepKind.FLIP]
    assert g.edges == ()


def test_full_foliation_models_need_flop_closure(atiyah_flop):
    f, pair = atiyah_flop
    assert len(enumerate_models(f, pair).nodes) == 1
    g = enumerate_models(f, pair, flop_closure=True)
    assert len(g.nodes) == 2
    assert {(e.source, e.target) for e in g.edges} == {(0, 1), (1, 0)}
    for node in g.nodes:
        assert is_nef(node.fan, pair.log_class(node.fan))


@pytest.mark.parametrize("method", ["certified", "bfs"])
def test_flop_connects_the_two_triangulations(atiyah_flop, method):
    f, pair = atiyah_flop
    g = enumerate_models(f, pair, flop_closure=True)
    a = g.index(fx.atiyah_delta1())
    b = g.index(fx.atiyah_delta2())
    path = flop_connect(g, a, b, method)
    assert path.values == (0,)
    assert len(path.walls) == 1 and path.walls[0].cone == (0, 2)
    assert path.fans[0].same_as(fx.atiyah_delta1()) and path.fans[-1].same_as(fx.atiyah_delta2())
    if method == "certified":
        assert path.cartier_index == 1
        assert path.epsilon == Fraction(1, 7)
    else:
        assert path.epsilon is None


def test_flop_connect_to_itself_is_empty(atiyah_flop):
    f, pair = atiyah_flop
    g = enumerate_models(f, pair, flop_closure=True)
    path = flop_connect(g, 0, 0)
    assert path.walls == () and len(path.fans) == 1


def test_flop_connect_refuses_models_with_different_rays():
    # the blowup contracts its exceptional ray, so the two fans share no flop graph
    f = fx.blowup_plane_cone()
    pair = FoliatedPair.on(f, ToricFoliation.full(2))
    (node,) = enumerate_models(f, pair).nodes
    assert node.fan.n_rays == 2
    merged = ModelGraph(f, pair, (node, ModelNode(f, pair, (), ())), ())
    with pytest.raises(NotSameGraph):
        flop_connect(merged, 0, 1)


def test_unknown_method_rejected(atiyah_flop):
    f, pair = atiyah_flop
    g = enumerate_models(f, pair, flop_closure=True)
    with pytest.raises(ValueError):
        flop_connect(g, 0, 1, "sideways")


def test_audit_on_atiyah_records_variety_zero(atiyah):
    f, pair = atiyah
    report = cone_bound_audit(f, pair)
    assert report.ok
    (entry,) = report.entries
    assert entry.foliated_value == -2
    assert entry.variety_value == 0
    assert not entry.variety_in_interval


def test_audit_on_p1xp1(p1xp1):
    f, pair = p1xp1
    report = cone_bound_audit(f, pair)
    assert report.ok
    assert [e.foliated_value for e in report.entries] == [-2]
    assert report.entries[0].variety_value == -2


def test_audit_nef_class_is_empty(atiyah_flop):
    f, pair = atiyah_flop
    assert cone_bound_audit(f, pair).entries == ()


def test_atiyah_geography_chambers(atiyah):
    f, pair = atiyah
    n = f.n_rays
    family = [ToricDivisor.ray(n, 1) + ToricDivisor.ray(n, 3)]
    geo = geography(f, pair.foliation, family)
    assert geo.covered and geo.disjoint
    by_model = {c.fan.key(): c for c in geo.chambers}
    d2 = by_model[fx.atiyah_delta2().key()]
    d1 = by_model[fx.atiyah_delta1().key()]
    assert sorted(d2.vertices) == [(Fraction(0),), (Fraction(1),)]
    assert d1.vertices == ((Fraction(1),),)
    assert geo.chambers_of((Fraction(1, 2),)) == [geo.chambers.index(d2)]
    assert len(geo.chambers_of((Fraction(1),))) == 2


def test_geography_on_a_plane_family():
    # boundary varies on the two rays tangent to the foliation
    f = fx.p1xp1()
    fol = fx.p1xp1_foliation()
    n = f.n_rays
    family = [ToricDivisor.ray(n, 0), ToricDivisor.ray(n, 2)]
    geo = geography(f, fol, family)
    assert geo.disjoint and geo.covered
    for c in geo.chambers:
        for v in c.vertices:
            assert all(isinstance(x, Fraction) for x in v)


def test_geography_rejects_non_ample_polarization(atiyah):
    f, pair = atiyah
    with pytest.raises(NotAmple):
        geography(f, pair.foliation, [ToricDivisor.ray(4, 1)], ample=ToricDivisor.zero(4),
                  polarization=Fraction(1))


def test_corpus_flop_paths_have_zero_steps(corpus):
    checked = 0
    for inst in corpus[:60]:
        g = enumerate_models(inst.fan, inst.pair, flop_closure=True)
        for nodes in g.components().values():
            if len(nodes) < 2:
                continue
            a, b = nodes[0], nodes[-1]
            for method in ("certified", "bfs"):
                path = flop_connect(g, a, b, method)
                assert all(v == 0 for v in path.values)
                assert path.fans[-1].same_as(g.nodes[b].fan)
            checked += 1
    assert checked > 0


def test_flop_edges_are_trivial_walls(corpus):
    for inst in corpus[:40]:
        g = enumerate_models(inst.fan, inst.pair, flop_closure=True)
        for e in g.edges:
            node = g.nodes[e.source]
            d = node.pair.log_class(node.fan)
            assert intersection_number(node.fan, d, e.wall) == 0


def test_enumeration_refuses_non_lc_pairs():
    f = Fan(2, ((1, 0), (0, 1)), ((0, 1),), relative=True)
    pair = FoliatedPair.on(f, ToricFoliation.full(2), moduli=ToricDivisor((3, 0)))
    with pytest.raises(NotLC):
        enumerate_models(f, pair)
    assert len(enumerate_models(f, pair, check_lc=False).nodes) == 1


def test_empty_family_is_one_chamber(atiyah):
    f, pair = atiyah
    geo = geography(f, pair.foliation, [])
    assert len(geo.chambers) == 1
    assert geo.chambers[0].fan.same_as(fx.atiyah_delta2())


@given(st.data())
def test_any_branch_lands_on_an_enumerated_model(corpus, data):
    # different choices of wall order reach the same set of outcomes
    inst = data.draw(st.sampled_from(corpus))
    seed = data.draw(st.integers(0, 10_000))
    g = enumerate_models(inst.fan, inst.pair, check_lc=False)
    trace = run_mmp(inst.fan, inst.pair, Seeded(seed), check_lc=False)
    if isinstance(trace.outcome, MinimalModel):
        assert any(n.fan.same_as(trace.final_fan) for n in g.nodes)
    else:
        assert any(m.fan.same_as(trace.outcome.fan) and m.wall.relation == trace.outcome.wall.relation
                   for m in g.fiber_outcomes)
