from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from folmmp import fixtures as fx
from folmmp import linalg as la
from folmmp.foliation import (BoundaryOutOfRange, FlcStatus, FoliatedPair, NotEquidimensional, ToricFoliation,
                              class_discrepancy, classical_discrepancy, classify_flc, epsilon,
                              foliated_canonical, foliated_discrepancy, induced_foliation_on_base,
                              is_dicritical, parallelepiped_points, pullback_to_subdivision, relint_meets)
from folmmp.polyhedral import Fan, NotInSupport
from folmmp.toric import ToricDivisor, canonical_divisor


def test_foliation_is_saturated():
    fol = ToricFoliation(3, ((2, 0, 2),))
    assert fol.basis == ((1, 0, 1),)
    assert fol.rank == 1 and fol.corank == 2
    assert fol.contains((3, 0, 3)) and not fol.contains((1, 0, 0))
    assert ToricFoliation.full(3).contains((5, -1, 2))
    assert not ToricFoliation.zero(2).contains((1, 0))


def test_atiyah_epsilon_and_canonical():
    f, fol = fx.atiyah_delta1(), fx.atiyah_foliation()
    assert [epsilon(f, fol, i) for i in range(4)] == [0, 1, 0, 1]
    assert foliated_canonical(f, fol).coeffs == (0, -1, 0, -1)


def test_boundary_range_is_enforced():
    f, fol = fx.atiyah_delta1(), fx.atiyah_foliation()
    FoliatedPair.on(f, fol, ToricDivisor((0, 1, 0, Fraction(1, 2))))
    with pytest.raises(BoundaryOutOfRange):
        FoliatedPair.on(f, fol, ToricDivisor((0, Fraction(3, 2), 0, 0)))
    with pytest.raises(BoundaryOutOfRange):
        FoliatedPair.on(f, fol, ToricDivisor((Fraction(1, 2), 0, 0, 0)))
    with pytest.raises(ValueError):
        FoliatedPair.on(fx.p1xp1(), fx.p1xp1_foliation(), moduli=ToricDivisor((-1, 0, 0, 0)))


def test_dicriticality_of_the_two_triangulations():
    fol = fx.atiyah_foliation()
    rep = is_dicritical(fx.atiyah_delta1(), fol)
    assert rep.dicritical
    assert rep.witness == ((0, 2), (1, 1, 2))
    assert not is_dicritical(fx.atiyah_delta2(), fol).dicritical


def test_relint_meets():
    f, fol = fx.atiyah_delta1(), fx.atiyah_foliation()
    assert relint_meets(f, fol, (0, 2)) == (1, 1, 2)
    assert relint_meets(f, fol, (0, 1)) is None


def test_atiyah_discrepancies(atiyah):
    f, pair = atiyah
    assert foliated_discrepancy(f, pair, (1, 1, 2)) == -1
    assert classical_discrepancy(f, pair.boundary, (1, 1, 2)) == 1
    with pytest.raises(ValueError):
        foliated_discrepancy(f, pair, (1, 0, 1))
    with pytest.raises(ValueError):
        foliated_discrepancy(f, pair, (2, 2, 4))
    with pytest.raises(NotInSupport):
        foliated_discrepancy(f, pair, (-1, 0, 1))


def test_flc_classification(atiyah):
    f, pair = atiyah
    rep = classify_flc(f, pair)
    assert rep.status == FlcStatus.CERTIFIED_FLC
    assert rep.lc_places == ((1, 1, 2),)
    assert rep.strictly_lc
    with_b = FoliatedPair.on(f, pair.foliation, ToricDivisor((0, 1, 0, 0)))
    assert classify_flc(f, with_b).status == FlcStatus.FLC_UP_TO_DEPTH
    assert classify_flc(f, pair, jobs=3) == rep


def test_not_lc_witness():
    # on a smooth cone, a moduli part 3 D_0 pushes the discrepancy of e1 + e2 to -2
    f = Fan(2, ((1, 0), (0, 1)), ((0, 1),), relative=True)
    pair = FoliatedPair.on(f, ToricFoliation.full(2), moduli=ToricDivisor((3, 0)))
    rep = classify_flc(f, pair)
    assert rep.status == FlcStatus.NOT_LC_WITNESS
    assert rep.witness_discrepancy < -1


def test_parallelepiped_points():
    assert parallelepiped_points([(1, 0), (1, 2)]) == [(1, 1)]
    assert parallelepiped_points([(1, 0), (0, 1)]) == []


def test_induced_foliation_on_p1():
    f, fol = fx.p1xp1(), fx.p1xp1_foliation()
    target = Fan(1, ((1,), (-1,)), ((0,), (1,)))
    induced = induced_foliation_on_base(((0, 1),), fol, f, target)
    assert induced.foliation.rank == 0
    assert induced.ramification.is_zero()
    assert induced.is_pullback
    with pytest.raises(NotEquidimensional):
        induced_foliation_on_base(((1, 1),), fol, f, target)


def test_structural_identity_on_corpus(corpus):
    for inst in corpus:
        f, fol = inst.fan, inst.foliation
        invariant = ToricDivisor(tuple(1 - fol.epsilon(r) for r in f.rays))
        assert foliated_canonical(f, fol) == canonical_divisor(f) + invariant


@given(st.data())
def test_discrepancy_is_resolution_independent(corpus, data):
    inst = data.draw(st.sampled_from(corpus))
    f, pair = inst.fan, inst.pair
    cone = data.draw(st.sampled_from(f.cones))
    gens = f.cone_rays(cone)
    c1 = data.draw(st.lists(st.integers(0, 2), min_size=len(gens), max_size=len(gens)).filter(lambda c: sum(c) > 1))
    c2 = data.draw(st.lists(st.integers(0, 3), min_size=len(gens), max_size=len(gens)).filter(lambda c: sum(c) > 1))
    w1 = la.primitive([sum(c * g[i] for c, g in zip(c1, gens)) for i in range(f.lattice_rank)])
    w2 = la.primitive([sum(c * g[i] for c, g in zip(c2, gens)) for i in range(f.lattice_rank)])
    if w1 in f.rays or w2 in f.rays or w1 == w2:
        return
    d = pair.log_class(f)
    y, d_y = pullback_to_subdivision(f, d, w1)
    assert class_discrepancy(y, pair.foliation, d_y, w2) == class_discrepancy(f, pair.foliation, d, w2)
