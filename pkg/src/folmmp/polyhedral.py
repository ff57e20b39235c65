"""Rational polyhedral cones, simplicial fans, walls and fan surgery.

A :class:`Fan` is an immutable value: rays are primitive integer vectors,
maximal cones are sorted tuples of ray indices.  Relative fans (supported in
a fixed strongly convex cone, i.e. projective over an affine toric base)
carry that support cone explicitly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional, Sequence

from . import linalg as la
from .lp import find_point, simplex_standard, strict_feasibility


class NonSimplicial(ValueError):
    pass


class NotInSupport(ValueError):
    pass


class AlreadyARay(ValueError):
    pass


class NotSurjective(ValueError):
    pass


# -- cones given by generators ----------------------------------------------


def in_cone(v: Sequence, gens: Sequence[Sequence]) -> bool:
    """Exact membership ``v in cone(gens)``."""
    if not any(v):
        return True
    if not gens:
        return False
    n = len(v)
    a = [[g[i] for g in gens] for i in range(n)]
    return simplex_standard(a, list(v), [0] * len(gens)).status != "infeasible"


def in_relint(v: Sequence, gens: Sequence[Sequence]) -> bool:
    """``v`` is a strictly positive combination of ``gens``."""
    if not gens:
        return not any(v)
    n = len(v)
    # homogenise: sum x_i g_i - s v = 0 with all x_i > 0, s > 0
    k = len(gens)
    eq = [[g[i] for g in gens] + [-v[i]] for i in range(n)]
    return strict_feasibility(eq, range(k + 1), k + 1) is not None


def cone_coordinates(v: Sequence, gens: Sequence[Sequence]) -> Optional[tuple[Fraction, ...]]:
    """Coordinates of ``v`` in linearly independent ``gens`` (``None`` if outside the span)."""
    n = len(v)
    a = tuple(tuple(g[i] for g in gens) for i in range(n))
    return la.solve_rational(a, v)


def is_strongly_convex(gens: Sequence[Sequence]) -> bool:
    if not gens:
        return True
    if la.rank(la.as_matrix(gens)) == len(gens):
        return True
    n = len(gens[0])
    # need m with <m, g> >= 1 for every generator
    return find_point([[-x for x in g] for g in gens], [-1] * len(gens), n=n) is not None


def cone_facets(gens: Sequence[Sequence], n: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Facet inequalities ``h.x >= 0`` and equations ``e.x = 0`` of ``cone(gens)``.

    Both are primitive integer vectors; facets are returned sorted and
    deduplicated.  Works for cones that are not full-dimensional.
    """
    gens = [tuple(g) for g in gens if any(g)]
    if not gens:
        return [], [tuple(int(i == j) for j in range(n)) for i in range(n)]
    eqs = la.orthogonal_complement(gens, n)
    d = la.rank(la.as_matrix(gens))
    facets: set[tuple[int, ...]] = set()
    for sub in itertools.combinations(range(len(gens)), d - 1):
        rows = [gens[i] for i in sub]
        if la.rank(la.as_matrix(rows)) != d - 1:
            continue
        h = _normal_in_span(rows, eqs, n, gens)
        if h is not None:
            facets.add(h)
    return sorted(facets), eqs


def _normal_in_span(rows, eqs, n, gens):
    ker = la.integer_kernel(la.as_matrix(list(rows) + list(eqs)), n) if (rows or eqs) else None
    if ker is None or len(ker) != 1:
        # full-dimensional half-line case falls here only when n == 1
        if not rows and not eqs and n == 1:
            ker = [(1,)]
        else:
            return None
    h = ker[0]
    vals = [la.dot(h, g) for g in gens]
    if all(x >= 0 for x in vals) and any(x > 0 for x in vals):
        return tuple(h)
    if all(x <= 0 for x in vals) and any(x < 0 for x in vals):
        return tuple(-x for x in h)
    return None


def extremal_generators(gens: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Primitive, deduplicated, irredundant generators of a strongly convex cone."""
    prim = sorted({la.primitive(g) for g in gens if any(g)})
    out = []
    for i, g in enumerate(prim):
        others = [h for j, h in enumerate(prim) if j != i]
        if not in_cone(g, others):
            out.append(g)
    return out


def lineality_space(gens: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """A rational basis of the largest linear subspace inside ``cone(gens)``."""
    inside = [g for g in gens if in_cone(tuple(-x for x in g), gens)]
    if not inside:
        return []
    rows, _ = la.rref(la.as_matrix(inside))
    return [tuple(r) for r in rows]


def cone_faces(gens: Sequence[Sequence], n: int) -> list[tuple[int, ...]]:
    """All nonzero faces of ``cone(gens)`` as sorted tuples of generator positions."""
    k = len(gens)
    if k == 0:
        return []
    if la.rank(la.as_matrix(gens)) == k:
        return [c for d in range(1, k + 1) for c in itertools.combinations(range(k), d)]
    facets, _ = cone_facets(gens, n)
    facet_sets = [frozenset(i for i in range(k) if la.dot(h, gens[i]) == 0) for h in facets]
    faces = {frozenset(range(k))}
    frontier = [frozenset(range(k))]
    while frontier:
        nxt = []
        for f in frontier:
            for fs in facet_sets:
                g = f & fs
                if g and g != f and g not in faces:
                    faces.add(g)
                    nxt.append(g)
        frontier = nxt
    return sorted((tuple(sorted(f)) for f in faces), key=lambda t: (len(t), t))


# -- fans --------------------------------------------------------------------


@dataclass(frozen=True)
class Fan:
    lattice_rank: int
    rays: tuple[tuple[int, ...], ...]
    cones: tuple[tuple[int, ...], ...]
    relative: bool = False
    support: Optional[tuple[tuple[int, ...], ...]] = None

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(sorted({tuple(sorted(set(int(i) for i in c))) for c in self.cones}))
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "cones", cones)
        for r in rays:
            if len(r) != self.lattice_rank:
                raise ValueError(f"ray {r} does not live in rank {self.lattice_rank}")
            if not la.is_primitive(r):
                raise ValueError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise ValueError("duplicate rays")
        for c in cones:
            if any(i < 0 or i >= len(rays) for i in c):
                raise ValueError(f"cone {c} references a missing ray")
            if not is_strongly_convex([rays[i] for i in c]):
                raise ValueError(f"cone {c} is not strongly convex")
        if self.relative:
            sup = self.support
            if sup is None:
                sup = tuple(extremal_generators(rays))
            object.__setattr__(self, "support", tuple(sorted(tuple(int(x) for x in g) for g in sup)))
        elif self.support is not None:
            object.__setattr__(self, "support", None)

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def cone_rays(self, cone: Sequence[int]) -> list[tuple[int, ...]]:
        return [self.rays[i] for i in cone]

    def cone_dim(self, cone: Sequence[int]) -> int:
        return la.rank(la.as_matrix(self.cone_rays(cone))) if cone else 0

    @cached_property
    def is_simplicial(self) -> bool:
        return all(self.cone_dim(c) == len(c) for c in self.cones)

    def ray_index(self, v: Sequence[int]) -> int:
        return self.rays.index(tuple(v))

    def all_cones(self) -> list[tuple[int, ...]]:
        """Every nonzero cone of the fan (faces of maximal cones), deduplicated."""
        out = set()
        for c in self.cones:
            for f in cone_faces(self.cone_rays(c), self.lattice_rank):
                out.add(tuple(sorted(c[i] for i in f)))
        return sorted(out, key=lambda t: (len(t), t))

    def containing_cone(self, v: Sequence) -> Optional[int]:
        """Index of the first maximal cone containing ``v``."""
        for k, c in enumerate(self.cones):
            if in_cone(v, self.cone_rays(c)):
                return k
        return None

    def support_generators(self) -> list[tuple[int, ...]]:
        return list(self.support) if self.support is not None else list(self.rays)

    def canonical(self) -> "Fan":
        order = sorted(range(self.n_rays), key=lambda i: self.rays[i])
        new = {old: k for k, old in enumerate(order)}
        return Fan(self.lattice_rank, tuple(self.rays[i] for i in order),
                   tuple(tuple(new[i] for i in c) for c in self.cones),
                   self.relative, self.support)

    def key(self) -> tuple:
        """Identity of the fan up to ray relabelling."""
        return (self.lattice_rank, tuple(sorted(self.rays)),
                tuple(sorted(tuple(sorted(self.rays[i] for i in c)) for c in self.cones)))

    def same_as(self, other: "Fan") -> bool:
        return self.key() == other.key()

    def with_cones(self, cones, rays=None) -> "Fan":
        return Fan(self.lattice_rank, self.rays if rays is None else rays, cones,
                   self.relative, self.support)


@dataclass(frozen=True)
class Violation:
    kind: str
    cones: tuple[int, ...]
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _properly_intersect(f: Fan, a: Sequence[int], b: Sequence[int]) -> bool:
    """Separation test: some m is >= 0 on ``a``, <= 0 on ``b``, zero exactly on common rays."""
    common = set(a) & set(b)
    only_a = [i for i in a if i not in common]
    only_b = [i for i in b if i not in common]
    if not only_a or not only_b:
        # one cone is a face-candidate of the other; containment is proper iff it is a face
        small, big = (a, b) if not only_a else (b, a)
        return _is_face(f, small, big)
    n = f.lattice_rank
    a_ub, b_ub = [], []
    for i in only_a:
        a_ub.append([-x for x in f.rays[i]])
        b_ub.append(-1)
    for i in only_b:
        a_ub.append(list(f.rays[i]))
        b_ub.append(-1)
    a_eq = [list(f.rays[i]) for i in common]
    return find_point(a_ub, b_ub, a_eq, [0] * len(a_eq), n=n) is not None


def _is_face(f: Fan, small: Sequence[int], big: Sequence[int]) -> bool:
    rest = [i for i in big if i not in small]
    if not rest:
        return True
    a_ub = [[-x for x in f.rays[i]] for i in rest]
    a_eq = [list(f.rays[i]) for i in small]
    return find_point(a_ub, [-1] * len(rest), a_eq, [0] * len(a_eq), n=f.lattice_rank) is not None


@lru_cache(maxsize=None)
def _support_facets(support: tuple, n: int):
    return cone_facets(support, n)


@lru_cache(maxsize=4096)
def validate_fan(f: Fan) -> ValidationReport:
    """Check the fan axioms; every violation is reported, nothing is raised."""
    out: list[Violation] = []
    used = {i for c in f.cones for i in c}
    for i in range(f.n_rays):
        if i not in used:
            out.append(Violation("unused_ray", (), f"ray {i} {f.rays[i]} lies in no maximal cone"))
    if not out and _locally_a_triangulation(f):
        return ValidationReport()
    for x, y in itertools.combinations(range(len(f.cones)), 2):
        if not _properly_intersect(f, f.cones[x], f.cones[y]):
            out.append(Violation("improper_intersection", (x, y),
                                 f"cones {f.cones[x]} and {f.cones[y]} do not meet in a common face"))
    if f.relative and f.cones:
        n = f.lattice_rank
        facets, eqs = _support_facets(f.support, n)
        if eqs:
            out.append(Violation("support", (), "relative support cone is not full-dimensional"))
        for k, c in enumerate(f.cones):
            if f.cone_dim(c) != n:
                out.append(Violation("not_full_dimensional", (k,), f"cone {c}"))
                continue
            for i in c:
                if any(la.dot(h, f.rays[i]) < 0 for h in facets):
                    out.append(Violation("outside_support", (k,), f"ray {i} leaves the support"))
        if not out:
            out.extend(_coverage_violations(f, facets))
    return ValidationReport(tuple(out))


def _locally_a_triangulation(f: Fan) -> bool:
    """Cheap sufficient check for relative simplicial fans.

    Full-dimensional simplicial cones inside the support, interior facets
    shared by exactly two cones lying on opposite sides, boundary facets owned
    once, and one point covered exactly once: the covering degree is then 1
    everywhere, so the cones form a fan.
    """
    n = f.lattice_rank
    if not (f.relative and f.cones) or any(len(c) != n or f.cone_dim(c) != n for c in f.cones):
        return False
    facets, eqs = _support_facets(f.support, n)
    if eqs or any(la.dot(h, r) < 0 for h in facets for r in f.rays):
        return False
    owners: dict[tuple[int, ...], list[int]] = {}
    for k, c in enumerate(f.cones):
        for r in c:
            owners.setdefault(tuple(x for x in c if x != r), []).append(r)
    for face, off in owners.items():
        on_boundary = any(all(la.dot(h, f.rays[i]) == 0 for i in face) for h in facets)
        if on_boundary:
            if len(off) != 1:
                return False
            continue
        if len(off) != 2:
            return False
        normal = la.integer_kernel(la.as_matrix(f.cone_rays(face)), n)[0]
        if la.dot(normal, f.rays[off[0]]) * la.dot(normal, f.rays[off[1]]) >= 0:
            return False
    p = [sum(r[i] for r in f.cone_rays(f.cones[0])) for i in range(n)]
    return not any(in_cone(p, f.cone_rays(c)) for c in f.cones[1:])


def _coverage_violations(f: Fan, support_facets) -> list[Violation]:
    """Codimension-one faces are interior walls or lie on the support boundary."""
    n = f.lattice_rank
    out = []
    owners: dict[tuple[int, ...], list[int]] = {}
    for k, c in enumerate(f.cones):
        if len(c) == n:
            faces = [tuple(x for x in c if x != r) for r in c]
        else:
            faces = [tuple(sorted(c[i] for i in fc)) for fc in cone_faces(f.cone_rays(c), n)
                     if f.cone_dim([c[i] for i in fc]) == n - 1]
        for face in faces:
            owners.setdefault(face, []).append(k)
    for face, ks in owners.items():
        on_boundary = any(all(la.dot(h, f.rays[i]) == 0 for i in face) for h in support_facets)
        if on_boundary and len(ks) != 1:
            out.append(Violation("coverage", tuple(ks), f"boundary face {face} shared"))
        elif not on_boundary and len(ks) != 2:
            out.append(Violation("coverage", tuple(ks), f"interior face {face} has {len(ks)} neighbours"))
    return out


# -- walls ---------------------------------------------------------------------


@dataclass(frozen=True)
class Wall:
    """Interior codimension-one cone of a simplicial fan with its primitive relation.

    ``relation[r]`` is the coefficient of ray ``r``; the two rays off the wall
    (``u_left`` in ``left``, ``u_right`` in ``right``) have positive coefficients.
    """
    cone: tuple[int, ...]
    left: int
    right: int
    u_left: int
    u_right: int
    relation: tuple[int, ...] = field(repr=False)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.cone) | {self.u_left, self.u_right}))

    def sign_partition(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        sup = self.support()
        neg = tuple(i for i in sup if self.relation[i] < 0)
        zero = tuple(i for i in sup if self.relation[i] == 0)
        pos = tuple(i for i in sup if self.relation[i] > 0)
        return neg, zero, pos


def wall_relation(f: Fan, cone: Sequence[int], u_left: int, u_right: int) -> tuple[int, ...]:
    idx = list(cone) + [u_left, u_right]
    mat = tuple(tuple(f.rays[i][k] for i in idx) for k in range(f.lattice_rank))
    ker = la.integer_kernel(mat, len(idx))
    if len(ker) != 1:
        raise NonSimplicial(f"wall {tuple(cone)} has a {len(ker)}-dimensional relation space")
    b = la.primitive(ker[0])
    if b[-2] < 0:
        b = tuple(-x for x in b)
    if b[-2] <= 0 or b[-1] <= 0:
        raise ValueError(f"wall {tuple(cone)} is not separating its neighbours")
    rel = [0] * f.n_rays
    for i, x in zip(idx, b):
        rel[i] = x
    return tuple(rel)


@lru_cache(maxsize=4096)
def walls(f: Fan) -> tuple[Wall, ...]:
    """All interior walls of a simplicial fan, sorted by wall cone."""
    if not f.is_simplicial:
        raise NonSimplicial("walls are only defined on simplicial fans")
    n = f.lattice_rank
    owners: dict[tuple[int, ...], list[int]] = {}
    for k, c in enumerate(f.cones):
        if len(c) != n:
            continue
        for r in c:
            owners.setdefault(tuple(x for x in c if x != r), []).append(k)
    out = []
    for face, ks in sorted(owners.items()):
        if len(ks) != 2:
            continue
        a, b = ks
        ua = next(i for i in f.cones[a] if i not in face)
        ub = next(i for i in f.cones[b] if i not in face)
        out.append(Wall(face, a, b, ua, ub, wall_relation(f, face, ua, ub)))
    return tuple(out)


# -- surgery -------------------------------------------------------------------


def star_subdivision(f: Fan, w: Sequence[int]) -> Fan:
    """Insert the primitive vector ``w`` as a new ray and re-fan its star."""
    w = tuple(int(x) for x in w)
    if not la.is_primitive(w):
        raise ValueError(f"{w} is not primitive")
    if w in f.rays:
        raise AlreadyARay(f"{w} is already a ray")
    new_idx = f.n_rays
    rays = f.rays + (w,)
    cones = []
    hit = False
    for c in f.cones:
        gens = f.cone_rays(c)
        if not in_cone(w, gens):
            cones.append(c)
            continue
        hit = True
        if f.cone_dim(c) == len(c):
            coords = cone_coordinates(w, gens)
            for pos, r in enumerate(c):
                if coords[pos] > 0:
                    cones.append(tuple(x for x in c if x != r) + (new_idx,))
        else:
            facets, _ = cone_facets(gens, f.lattice_rank)
            for h in facets:
                if la.dot(h, w) > 0:
                    cones.append(tuple(x for x in c if la.dot(h, f.rays[x]) == 0) + (new_idx,))
    if not hit:
        raise NotInSupport(f"{w} is not in the support of the fan")
    return Fan(f.lattice_rank, rays, cones, f.relative, f.support)


@dataclass(frozen=True)
class ConeImage:
    generators: tuple[tuple[int, ...], ...]
    inequalities: tuple[tuple[int, ...], ...]
    equations: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return la.rank(la.as_matrix(self.generators)) if self.generators else 0

    def contains(self, v: Sequence) -> bool:
        return (all(la.dot(h, v) >= 0 for h in self.inequalities)
                and all(la.dot(e, v) == 0 for e in self.equations))

    def in_interior(self, v: Sequence) -> bool:
        return not self.equations and all(la.dot(h, v) > 0 for h in self.inequalities)


def cone_pushforward(linear_map: Sequence[Sequence[int]], gens: Sequence[Sequence[int]]) -> ConeImage:
    """Image of ``cone(gens)`` under a surjective integer map, with its facets."""
    m = la.as_matrix(linear_map)
    k = len(m)
    if k and la.rank(m) < k:
        raise NotSurjective(f"map of rank {la.rank(m)} onto rank {k}")
    images = [la.matvec(m, g) for g in gens]
    ext = extremal_generators(images) if k else []
    facets, eqs = cone_facets(ext, k) if k else ([], [])
    return ConeImage(tuple(ext), tuple(facets), tuple(eqs))


def preimage_meets_interior(linear_map, gens, h) -> Optional[tuple[Fraction, ...]]:
    """A point of ``int cone(gens)`` whose image lies on the hyperplane ``h = 0``.

    Interior points are exactly the strictly positive combinations of the
    generators of a full-dimensional cone.
    """
    m = la.as_matrix(linear_map)
    row = [la.dot(h, la.matvec(m, g)) for g in gens]
    lam = strict_feasibility([row], range(len(gens)), len(gens))
    if lam is None:
        return None
    n = len(gens[0])
    return tuple(sum(l * g[i] for l, g in zip(lam, gens)) for i in range(n))
