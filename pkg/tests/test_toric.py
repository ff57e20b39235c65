from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from folmmp import fixtures as fx
from folmmp import linalg as la
from folmmp.polyhedral import Fan, walls
from folmmp.toric import (NotIntegral, NotNef, NotQCartier, ToricDivisor, ample_divisor, canonical_divisor,
                          cartier_data, class_group, intersection_number, is_ample, is_extremal, is_nef,
                          principal_divisor, pullback, semiample_fibration, support_value, transport,
                          wall_curve, wall_values)


def test_divisor_arithmetic():
    d = ToricDivisor((1, Fraction(1, 2), 0))
    assert (d + d).coeffs == (2, 1, 0)
    assert (2 * d - d) == d
    assert (-d).coeffs == (-1, Fraction(-1, 2), 0)
    assert not d.is_integral() and (2 * d).is_integral()
    assert ToricDivisor.from_dict(3, {2: "1/3"}).coeffs == (0, 0, Fraction(1, 3))
    with pytest.raises(ValueError):
        d + ToricDivisor.zero(2)


def test_cartier_index_of_weighted_cone():
    # cone((1,0),(1,2)) has multiplicity 2; D_0 needs m = (-1, 1/2)
    f = Fan(2, ((1, 0), (1, 2)), ((0, 1),), relative=True)
    cd = cartier_data(f, ToricDivisor.ray(2, 0))
    assert cd.functionals == ((-1, Fraction(1, 2)),)
    assert cd.index == 2
    assert cartier_data(f, ToricDivisor((2, 0))).index == 1
    assert support_value(f, ToricDivisor.ray(2, 0), (1, 0)) == -1


def test_non_q_cartier_on_square_cone():
    f = Fan(3, fx.ATIYAH_RAYS, ((0, 1, 2, 3),), relative=True)
    with pytest.raises(NotQCartier):
        cartier_data(f, ToricDivisor.ray(4, 0))
    # the canonical divisor of a Gorenstein cone is Cartier
    assert cartier_data(f, canonical_divisor(f)).index == 1


def test_p1xp1_intersections():
    f = fx.p1xp1()
    ws = walls(f)
    assert [w.relation for w in ws] == [(0, 1, 0, 1), (1, 0, 1, 0), (0, 1, 0, 1), (1, 0, 1, 0)]
    assert wall_curve(f, ws[0]) == (0, 1, 0, 1)
    assert [intersection_number(f, canonical_divisor(f), w) for w in ws] == [-2, -2, -2, -2]


def test_blowup_exceptional_curve():
    f = fx.blowup_plane_cone()
    (w,) = walls(f)
    assert intersection_number(f, canonical_divisor(f), w) == -1
    assert intersection_number(f, ToricDivisor.ray(3, 2), w) == -1


def test_nef_and_ample_on_p1xp1():
    f = fx.p1xp1()
    assert is_nef(f, ToricDivisor((1, 0, 0, 0))) and not is_ample(f, ToricDivisor((1, 0, 0, 0)))
    assert is_ample(f, ToricDivisor((1, 1, 0, 0)))
    assert not is_nef(f, ToricDivisor((-1, 0, 0, 0)))
    amp = ample_divisor(f)
    assert amp is not None and is_ample(f, amp)


def test_semiample_fibration_of_a_ruling():
    f = fx.p1xp1()
    d = ToricDivisor((1, 0, 0, 0))
    sf = semiample_fibration(f, d)
    assert sf.linear_map == ((1, 0),)
    assert sf.target.rays == ((-1,), (1,))
    assert pullback(sf.linear_map, sf.target, sf.descended, f) + principal_divisor(f, sf.character) == d
    with pytest.raises(NotNef):
        semiample_fibration(f, ToricDivisor((-1, 0, 0, 0)))
    with pytest.raises(NotIntegral):
        semiample_fibration(f, ToricDivisor((Fraction(1, 2), 0, 0, 0)))


def test_semiample_fibration_of_ample_is_identity_like():
    f = fx.p1xp1()
    d = ToricDivisor((1, 1, 0, 0))
    sf = semiample_fibration(f, d)
    assert sf.target.lattice_rank == 2 and sf.target.same_as(f)


def test_class_groups():
    assert class_group(fx.p1xp1()) == (2, [])
    # rays (1,0), (-1,2), (-1,-2): maximal minors have gcd 2
    f = Fan(2, ((1, 0), (-1, 2), (-1, -2)), ((0, 1), (1, 2), (2, 0)))
    assert class_group(f) == (1, [2])


def test_transport_follows_ray_identity():
    a, b = fx.atiyah_delta1(), fx.atiyah_delta2()
    d = ToricDivisor((1, 2, 3, 4))
    assert transport(d, a, b) == d
    y = fx.blowup_plane_cone()
    base = Fan(2, ((1, 0), (0, 1)), ((0, 1),), relative=True)
    assert transport(ToricDivisor((1, 2, 5)), y, base).coeffs == (1, 2)


def test_extremality_on_pentagon():
    rays = ((0, 0, 1), (1, 0, 1), (0, 1, 1), (-1, 1, 1), (-1, 0, 1), (0, -1, 1))
    pent = Fan(3, rays, [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1)], relative=True)
    flags = {w.cone: is_extremal(pent, w) for w in walls(pent)}
    assert flags == {(0, 1): False, (0, 2): True, (0, 3): True, (0, 4): True, (0, 5): False}


def test_principal_divisors_are_numerically_trivial(corpus):
    for inst in corpus:
        f = inst.fan
        for m in la.identity(f.lattice_rank):
            assert all(v == 0 for v in wall_values(f, principal_divisor(f, m)))


@given(st.data())
def test_wall_values_match_intersection_numbers(corpus, data):
    inst = data.draw(st.sampled_from(corpus))
    f = inst.fan
    coeffs = data.draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4),
                                min_size=f.n_rays, max_size=f.n_rays))
    d = ToricDivisor(tuple(coeffs))
    assert wall_values(f, d) == [intersection_number(f, d, w) for w in walls(f)]
