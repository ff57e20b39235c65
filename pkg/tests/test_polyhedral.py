import itertools

import pytest
from hypothesis import given, strategies as st

from folmmp import fixtures as fx
from folmmp import linalg as la
from folmmp.polyhedral import (AlreadyARay, Fan, NonSimplicial, NotInSupport, NotSurjective, cone_coordinates,
                               cone_faces, cone_pushforward, extremal_generators, in_cone, in_relint,
                               is_strongly_convex, lineality_space, preimage_meets_interior,
                               star_subdivision, validate_fan, walls, _properly_intersect)


def test_cone_membership():
    gens = [(1, 0), (1, 2)]
    assert in_cone((2, 1), gens) and in_relint((2, 1), gens)
    assert in_cone((1, 0), gens) and not in_relint((1, 0), gens)
    assert not in_cone((0, 1), gens)
    assert cone_coordinates((2, 2), gens) == (1, 1)


def test_convexity_and_generators():
    assert is_strongly_convex([(1, 0), (0, 1)])
    assert not is_strongly_convex([(1, 0), (-1, 0)])
    assert sorted(extremal_generators([(1, 0), (0, 1), (1, 1)])) == [(0, 1), (1, 0)]
    assert len(lineality_space([(1, 0), (-1, 0), (0, 1)])) == 1


def test_faces_of_square_cone():
    gens = fx.ATIYAH_RAYS
    faces = cone_faces(gens, 3)
    assert sum(len(f) == 1 for f in faces) == 4
    assert sum(len(f) == 2 for f in faces) == 4   # diagonals are not faces


def test_fixture_fans_are_valid():
    for f in (fx.atiyah_delta1(), fx.atiyah_delta2(), fx.p1xp1(), fx.blowup_plane_cone()):
        assert validate_fan(f).ok


def test_overlapping_cones_are_reported():
    bad = Fan(3, fx.ATIYAH_RAYS, ((0, 1, 2), (0, 2, 3), (0, 1, 3)), relative=True)
    report = validate_fan(bad)
    assert not report.ok
    assert any(v.kind == "improper_intersection" for v in report.violations)


def test_gap_in_support_is_reported():
    holey = Fan(3, fx.ATIYAH_RAYS[:3], ((0, 1, 2),), relative=True,
                support=tuple(fx.ATIYAH_RAYS))
    assert any(v.kind == "coverage" for v in validate_fan(holey).violations)


def test_unused_ray_is_reported():
    f = Fan(2, ((1, 0), (0, 1), (1, 1)), ((0, 1),), relative=True, support=((1, 0), (0, 1)))
    assert any(v.kind == "unused_ray" for v in validate_fan(f).violations)


def test_constructor_rejects_garbage():
    with pytest.raises(ValueError):
        Fan(2, ((2, 0), (0, 1)), ((0, 1),))
    with pytest.raises(ValueError):
        Fan(2, ((1, 0), (-1, 0)), ((0, 1),))
    with pytest.raises(ValueError):
        Fan(2, ((1, 0),), ((0, 1),))


def test_atiyah_wall_relation():
    (w,) = walls(fx.atiyah_delta1())
    assert w.cone == (0, 2)
    assert w.relation == (-1, 1, -1, 1)     # v1 + v3 = v0 + v2
    assert w.sign_partition() == ((0, 2), (), (1, 3))


def test_walls_need_simplicial_fans():
    f = Fan(3, fx.ATIYAH_RAYS, ((0, 1, 2, 3),), relative=True)
    with pytest.raises(NonSimplicial):
        walls(f)


def test_star_subdivision():
    # the wall point v0 + v2 splits both cones of the first triangulation
    y = star_subdivision(fx.atiyah_delta1(), (1, 1, 2))
    assert y.cones == ((0, 1, 4), (0, 3, 4), (1, 2, 4), (2, 3, 4))
    assert validate_fan(y).ok
    with pytest.raises(AlreadyARay):
        star_subdivision(fx.atiyah_delta1(), (1, 0, 1))
    with pytest.raises(NotInSupport):
        star_subdivision(fx.blowup_plane_cone(), (-1, 1))


def test_pushforward_and_preimage():
    img = cone_pushforward(((1, 0),), [(1, 0), (0, 1)])
    assert img.generators == ((1,),) and img.dim == 1
    with pytest.raises(NotSurjective):
        cone_pushforward(((1, 0), (2, 0)), [(1, 0)])
    pt = preimage_meets_interior(((1, 0, 0),), [(1, 0, 1), (-1, 0, 1), (0, 1, 1)], (1,))
    assert pt is not None


@st.composite
def subdivided_cones(draw):
    base = draw(st.sampled_from([fx.atiyah_delta1(), fx.atiyah_delta2(), fx.blowup_plane_cone()]))
    f = base
    for _ in range(draw(st.integers(0, 3))):
        k = draw(st.integers(0, len(f.cones) - 1))
        gens = f.cone_rays(f.cones[k])
        coeffs = draw(st.lists(st.integers(0, 2), min_size=len(gens), max_size=len(gens)).filter(any))
        v = la.primitive([sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(f.lattice_rank)])
        if v in f.rays:
            continue
        f = star_subdivision(f, v)
    return f


@given(subdivided_cones())
def test_fast_validation_agrees_with_pairwise_check(f):
    assert validate_fan(f).ok
    for a, b in itertools.combinations(f.cones, 2):
        assert _properly_intersect(f, a, b)


@given(subdivided_cones())
def test_wall_relations_are_primitive_and_signed(f):
    for w in walls(f):
        rel = w.relation
        assert la.is_primitive([x for x in rel if x] or [1])
        assert rel[w.u_left] > 0 and rel[w.u_right] > 0
        assert all(sum(rel[i] * f.rays[i][k] for i in range(f.n_rays)) == 0 for k in range(f.lattice_rank))
