"""Exact rational polytopes in H-representation.

Only small dimensions occur (coefficient spaces of families with a handful
of parameters), so vertex enumeration is by brute force over constraint
subsets and volumes are computed by recursive pyramid decomposition.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg as la
from .lp import OPTIMAL, find_point, linprog

Row = tuple[Fraction, ...]


def _frac_row(r) -> Row:
    return tuple(Fraction(x) for x in r)


@dataclass(frozen=True)
class Polytope:
    """``{t : a t <= b, c t = d}`` in ``Q^dim``."""
    dim: int
    a: tuple[Row, ...] = ()
    b: tuple[Fraction, ...] = ()
    c: tuple[Row, ...] = ()
    d: tuple[Fraction, ...] = ()

    @classmethod
    def make(cls, dim: int, ineqs: Sequence[tuple[Sequence, object]] = (),
             eqs: Sequence[tuple[Sequence, object]] = ()) -> "Polytope":
        ineqs = sorted({(_frac_row(r), Fraction(x)) for r, x in _normalise(ineqs)})
        eqs = sorted({(_frac_row(r), Fraction(x)) for r, x in _normalise(eqs, sign=True)})
        return cls(dim, tuple(r for r, _ in ineqs), tuple(x for _, x in ineqs),
                   tuple(r for r, _ in eqs), tuple(x for _, x in eqs))

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polytope":
        k = len(lo)
        rows = []
        for i in range(k):
            e = [0] * k
            e[i] = 1
            rows.append((tuple(e), hi[i]))
            rows.append((tuple(-x for x in e), -Fraction(lo[i])))
        return cls.make(k, rows)

    def intersect(self, other: "Polytope") -> "Polytope":
        return Polytope.make(self.dim, list(zip(self.a, self.b)) + list(zip(other.a, other.b)),
                             list(zip(self.c, self.d)) + list(zip(other.c, other.d)))

    def add(self, ineqs=(), eqs=()) -> "Polytope":
        return Polytope.make(self.dim, list(zip(self.a, self.b)) + list(ineqs),
                             list(zip(self.c, self.d)) + list(eqs))

    def contains(self, t: Sequence) -> bool:
        return (all(la.dot(r, t) <= x for r, x in zip(self.a, self.b))
                and all(la.dot(r, t) == x for r, x in zip(self.c, self.d)))

    def point(self) -> Optional[tuple[Fraction, ...]]:
        if self.dim == 0:
            return () if all(x >= 0 for x in self.b) and all(x == 0 for x in self.d) else None
        return find_point(self.a, self.b, self.c, self.d, n=self.dim)

    def is_empty(self) -> bool:
        return self.point() is None

    def interior_slack(self) -> Fraction:
        """Largest ``s`` with a point satisfying every inequality with slack ``s`` (capped at 1)."""
        if self.c:
            return Fraction(0) if not self.is_empty() else Fraction(-1)
        k = self.dim
        a_ub = [list(r) + [1] for r in self.a] + [[0] * k + [1]]
        b_ub = list(self.b) + [1]
        res = linprog([0] * k + [-1], a_ub, b_ub)
        return -res.value if res.status == OPTIMAL else Fraction(-1)

    def has_interior(self) -> bool:
        return self.interior_slack() > 0

    def vertices(self) -> list[tuple[Fraction, ...]]:
        return list(self._vertices)

    @cached_property
    def _vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        k = self.dim
        if k == 0:
            return ((),) if self.point() is not None else ()
        rows = list(zip(self.a, self.b))
        eqs = list(zip(self.c, self.d))
        need = k - len(eqs)
        out = set()
        for pick in itertools.combinations(range(len(rows)), max(need, 0)):
            mat = [r for r, _ in eqs] + [rows[i][0] for i in pick]
            rhs = [x for _, x in eqs] + [rows[i][1] for i in pick]
            if la.rank(la.as_matrix(mat)) < k:
                continue
            sol = la.solve_rational(la.as_matrix(mat), rhs)
            if sol is not None and self.contains(sol):
                out.add(sol)
        return tuple(sorted(out))

    def affine_dim(self) -> int:
        vs = self.vertices()
        if not vs:
            return -1
        diffs = [tuple(x - y for x, y in zip(v, vs[0])) for v in vs[1:]]
        return la.rank(la.as_matrix(diffs)) if diffs else 0

    def volume(self) -> Fraction:
        """Exact ``dim``-dimensional volume (zero when not full-dimensional)."""
        vs = self.vertices()
        if self.affine_dim() < self.dim:
            return Fraction(0)
        return hull_volume(vs, self.dim)

    def contains_polytope(self, other: "Polytope") -> bool:
        return all(self.contains(v) for v in other.vertices())


def _normalise(rows, sign: bool = False):
    """Scale each constraint to integer coefficients with unit content."""
    for r, x in rows:
        vals = [Fraction(v) for v in r] + [Fraction(x)]
        if not any(vals[:-1]):
            if vals[-1] < 0 or (sign and vals[-1] != 0):
                # keep an unsatisfiable row so emptiness survives
                yield tuple(0 for _ in r), -1
            continue
        p = la.primitive(vals)
        # primitive() keeps the direction, so inequality orientation is preserved
        if sign and next(v for v in p[:-1] if v) < 0:
            p = tuple(-v for v in p)
        yield p[:-1], p[-1]


def hull_volume(points: Sequence[Sequence[Fraction]], k: int) -> Fraction:
    """Volume of the convex hull of ``points`` in ``Q^k`` by pyramids over facets."""
    pts = sorted(set(tuple(Fraction(x) for x in p) for p in points))
    if k == 0:
        return Fraction(1) if pts else Fraction(0)
    if len(pts) <= k:
        return Fraction(0)
    if k == 1:
        return max(p[0] for p in pts) - min(p[0] for p in pts)
    centre = tuple(sum(p[i] for p in pts) / len(pts) for i in range(k))
    total = Fraction(0)
    seen = set()
    for pick in itertools.combinations(range(len(pts)), k):
        base = pts[pick[0]]
        diffs = [tuple(x - y for x, y in zip(pts[i], base)) for i in pick[1:]]
        if la.rank(la.as_matrix(diffs)) < k - 1:
            continue
        normal = la.nullspace(la.as_matrix(diffs), k)[0]
        off = la.dot(normal, base)
        sides = [la.dot(normal, p) - off for p in pts]
        if any(s > 0 for s in sides) and any(s < 0 for s in sides):
            continue
        key = la.primitive(list(normal) + [off])
        if any(s > 0 for s in sides):
            key = tuple(-x for x in key)
        if key in seen:
            continue
        seen.add(key)
        facet = [p for p, s in zip(pts, sides) if s == 0]
        # drop a coordinate with nonzero normal entry to measure the facet
        j = next(i for i, x in enumerate(normal) if x)
        proj = [tuple(x for i, x in enumerate(p) if i != j) for p in facet]
        height = abs(la.dot(normal, centre) - off)
        total += height * hull_volume(proj, k - 1) / abs(normal[j])
    return total / k


def project_out(ineqs: Sequence[tuple[Sequence, object]], n_keep: int) -> list[tuple[Row, Fraction]]:
    """Fourier-Motzkin: eliminate every variable after the first ``n_keep``.

    Input rows ``(row, rhs)`` mean ``row . x <= rhs``.
    """
    rows = [(_frac_row(r), Fraction(x)) for r, x in ineqs]
    n = len(rows[0][0]) if rows else n_keep
    for var in range(n - 1, n_keep - 1, -1):
        pos = [(r, x) for r, x in rows if r[var] > 0]
        neg = [(r, x) for r, x in rows if r[var] < 0]
        rows = [(r, x) for r, x in rows if r[var] == 0]
        for (rp, xp), (rn, xn) in itertools.product(pos, neg):
            sp, sn = -rn[var], rp[var]
            r = tuple(sp * u + sn * v for u, v in zip(rp, rn))
            rows.append((r, sp * xp + sn * xn))
        rows = _prune(rows, var)
    return [(r[:n_keep], x) for r, x in rows]


def _prune(rows, var):
    scaled = set()
    for r, x in rows:
        if any(r):
            p = la.primitive(list(r) + [x])
            scaled.add((tuple(Fraction(v) for v in p[:-1]), Fraction(p[-1])))
        elif x < 0:
            return [(r, x)]
    out = sorted(scaled)
    # drop constraints implied by the ones kept so far plus the ones still to check
    keep = []
    for i, (r, x) in enumerate(out):
        others = keep + out[i + 1:]
        if others:
            res = linprog([-v for v in r], [o[0] for o in others], [o[1] for o in others])
            if res.status == OPTIMAL and -res.value <= x:
                continue
        keep.append((r, x))
    return keep
