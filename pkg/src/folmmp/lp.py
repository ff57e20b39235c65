"""Exact rational linear programming.

A dense two-phase tableau simplex with Bland's rule, so results are
deterministic and cycling cannot occur. Tableau rows are kept as integer
multiples of the true rows (fraction-free pivoting, gcd-reduced), which is
several times faster than ``Fraction`` arithmetic at these sizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

from .linalg import matvec

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


def _pivot(tab: list[list[int]], basis: list[int], r: int, c: int) -> None:
    # Rows are integer multiples (positive scale) of the true tableau rows;
    # the basic entry of each row equals that row's scale.
    prow = tab[r]
    p = prow[c]
    if p < 0:
        prow[:] = [-x for x in prow]
        p = -p
    nz = [j for j, x in enumerate(prow) if x]
    for i, row in enumerate(tab):
        if i == r:
            continue
        f = row[c]
        if not f:
            continue
        for j in range(len(row)):
            row[j] *= p
        for j in nz:
            row[j] -= f * prow[j]
        g = gcd(*row)
        if g > 1:
            row[:] = [x // g for x in row]
    basis[r] = c


def _run(tab, basis, obj: int, allowed: int) -> bool:
    """Minimise the objective stored in row ``obj``; False if unbounded."""
    m = obj
    while True:
        cost = tab[obj]
        col = next((j for j in range(allowed) if cost[j] < 0), None)
        if col is None:
            return True
        best, best_ratio = None, None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = Fraction(tab[i][-1], a)
                if best is None or ratio < best_ratio or (ratio == best_ratio and basis[i] < basis[best]):
                    best, best_ratio = i, ratio
        if best is None:
            return False
        _pivot(tab, basis, best, col)


def _integer_row(row: Sequence) -> list[int]:
    den = lcm(*(v.denominator for v in row if isinstance(v, Fraction)))
    return [int(v * den) for v in row]


def simplex_standard(a: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Minimise ``c x`` subject to ``a x = b`` and ``x >= 0``."""
    m = len(a)
    n = len(c)
    # phase one: artificial variables n .. n+m-1
    tab = []
    for i, (row, bi) in enumerate(zip(a, b)):
        vals = list(row) + [bi]
        scale = lcm(*(v.denominator for v in vals if isinstance(v, Fraction)))
        if bi < 0:
            scale = -scale
        full = [int(v * scale) for v in vals]
        art = [0] * m
        art[i] = abs(scale)
        full = full[:-1] + art + [full[-1]]
        g = gcd(*full)
        tab.append([x // g for x in full])
    common = lcm(*(row[n + i] for i, row in enumerate(tab))) if tab else 1
    phase1 = [0] * (n + m + 1)
    for i, row in enumerate(tab):
        w = common // row[n + i]
        for j in range(n):
            phase1[j] -= w * row[j]
        phase1[-1] -= w * row[-1]
    tab.append(phase1)
    basis = list(range(n, n + m))
    _run(tab, basis, m, n + m)
    if tab[m][-1] != 0:
        return LPResult(INFEASIBLE)
    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, basis, i, col)
        i += 1
    mm = len(basis)
    tab = [row[:n] + [row[-1]] for row in tab[:mm]]
    cost = _integer_row(list(c) + [0])
    for i, j in enumerate(basis):
        f = cost[j]
        if f:
            s = tab[i][j]
            cost = [x * s - f * y for x, y in zip(cost, tab[i])]
    tab.append(cost)
    if not _run(tab, basis, mm, n):
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = Fraction(tab[i][-1], tab[i][j])
    value = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
    return LPResult(OPTIMAL, tuple(x), Fraction(value))


def linprog(c: Sequence, a_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
            a_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
            nonneg: Sequence[bool] | None = None) -> LPResult:
    """Minimise ``c x`` with ``a_ub x <= b_ub`` and ``a_eq x = b_eq``.

    Variables are free unless flagged in ``nonneg``.
    """
    n = len(c)
    nonneg = list(nonneg) if nonneg is not None else [False] * n
    # column map: each free variable becomes x+ - x-
    cols: list[tuple[int, int]] = []
    for j in range(n):
        cols.append((j, 1))
        if not nonneg[j]:
            cols.append((j, -1))
    k = len(a_ub)

    def expand(row):
        return [row[j] * s for j, s in cols]

    rows, rhs = [], []
    for i, (row, bi) in enumerate(zip(a_ub, b_ub)):
        rows.append(expand(row) + [int(i == t) for t in range(k)])
        rhs.append(bi)
    for row, bi in zip(a_eq, b_eq):
        rows.append(expand(row) + [0] * k)
        rhs.append(bi)
    cost = expand(c) + [0] * k
    res = simplex_standard(rows, rhs, cost)
    if res.status != OPTIMAL:
        return LPResult(res.status)
    x = [Fraction(0)] * n
    for (j, s), val in zip(cols, res.x):
        x[j] += s * val
    x = tuple(x)
    _verify(a_ub, b_ub, a_eq, b_eq, x)
    return LPResult(OPTIMAL, x, res.value)


def _verify(a_ub, b_ub, a_eq, b_eq, x) -> None:
    """Substitute the solution back, on integer numerators over a common denominator."""
    den = lcm(*(v.denominator for v in x))
    nums = [v.numerator * (den // v.denominator) for v in x]
    for rows, rhs, eq in ((a_ub, b_ub, False), (a_eq, b_eq, True)):
        for row, bi in zip(rows, rhs):
            lhs = sum(a * v for a, v in zip(row, nums) if a)
            ok = lhs == bi * den if eq else lhs <= bi * den
            if not ok:
                raise AssertionError("simplex returned a point violating its constraints")


def find_point(a_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
               a_eq: Sequence[Sequence] = (), b_eq: Sequence = (), n: int | None = None
               ) -> Optional[tuple[Fraction, ...]]:
    """Any point of ``{x : a_ub x <= b_ub, a_eq x = b_eq}`` (free variables)."""
    if n is None:
        n = len((list(a_ub) + list(a_eq))[0])
    res = linprog([0] * n, a_ub, b_ub, a_eq, b_eq)
    return res.x if res.status == OPTIMAL else None


def strict_feasibility(eq: Sequence[Sequence], strict_pos_vars: Sequence[int],
                       nvars: int | None = None) -> Optional[tuple[Fraction, ...]]:
    """Find ``x`` with ``eq x = 0``, ``x_i > 0`` on ``strict_pos_vars`` and ``x >= 0``.

    The system is homogeneous, so strict positivity can be traded for
    ``x_i >= 1`` by scaling; the resulting LP is solved by the exact simplex.
    Returns ``None`` when no such point exists.
    """
    if nvars is None:
        nvars = len(eq[0]) if eq else 0
    strict = sorted(set(strict_pos_vars))
    # substitute x_i = y_i + 1 on the strict variables
    shift = [Fraction(int(i in strict)) for i in range(nvars)]
    rhs = [-sum(Fraction(a) * s for a, s in zip(row, shift)) for row in eq]
    res = simplex_standard([list(r) for r in eq], rhs, [0] * nvars)
    if res.status == INFEASIBLE:
        return None
    x = tuple(y + s for y, s in zip(res.x, shift))
    assert all(v == 0 for v in matvec(tuple(tuple(r) for r in eq), x)) if eq else True
    assert all(x[i] > 0 for i in strict) and all(v >= 0 for v in x)
    return x
