"""Exact integer and rational linear algebra.

Matrices are tuples of row tuples holding ``int`` or ``fractions.Fraction``.
Nothing in here ever touches a float.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

Vector = tuple
Matrix = tuple


class DependentGenerators(ValueError):
    pass


def as_matrix(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def shape(m: Matrix) -> tuple[int, int]:
    if not m:
        return 0, 0
    return len(m), len(m[0])


def transpose(m: Matrix, ncols: int | None = None) -> Matrix:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError(f"shape mismatch {shape(a)} x {shape(b)}")
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> Vector:
    for row in a:
        if len(row) != len(v):
            raise ValueError(f"shape mismatch: row of length {len(row)} vs vector {len(v)}")
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def primitive(v: Sequence) -> Vector:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g == 1


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    rows = [[Fraction(x) for x in r] for r in m]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _integer_rank(m: Matrix) -> int:
    rows = [list(r) for r in m if any(r)]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        for i in range(r + 1, len(rows)):
            a = rows[i][c]
            if a:
                row = [piv[c] * x - a * y for x, y in zip(rows[i], piv)]
                g = 0
                for x in row:
                    g = gcd(g, x)
                rows[i] = [x // g for x in row] if g > 1 else row
        r += 1
        if r == len(rows):
            break
    return r


def rank(m: Matrix) -> int:
    if all(isinstance(x, int) for row in m for x in row):
        return _integer_rank(m)
    return len(rref(m)[1])


def nullspace(m: Matrix, ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of the rational right kernel of ``m``."""
    if not m:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    n = len(m[0])
    rows, pivots = rref(m)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def det(m: Matrix) -> Fraction | int:
    """Determinant by fraction-free Bareiss elimination (exact for ints)."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else Fraction(num) / prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve_rational(a: Matrix, b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """One exact solution of ``a x = b``, or ``None`` if the system is inconsistent.

    Free variables are set to zero. The returned vector is checked by substitution.
    """
    m = len(a)
    if len(b) != m:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m}")
    if m == 0:
        return None if any(b) else ()
    n = len(a[0])
    sol = _solve_integer(a, b, n)
    if sol is None:
        return None
    assert matvec(a, sol) == tuple(Fraction(v) for v in b)
    return sol


def _solve_integer(a: Matrix, b: Sequence, n: int) -> Optional[tuple[Fraction, ...]]:
    # Fraction-free forward elimination on integer-scaled rows, then exact
    # back substitution; free variables are zero.
    rows = []
    for row, bi in zip(a, b):
        vals = list(row) + [bi]
        den = lcm(*(v.denominator for v in vals if isinstance(v, Fraction)))
        rows.append([int(v * den) for v in vals])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        for i in range(r + 1, len(rows)):
            x = rows[i][c]
            if x:
                row = [piv[c] * u - x * v for u, v in zip(rows[i], piv)]
                g = gcd(*row)
                rows[i] = [u // g for u in row] if g > 1 else row
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    if any(row[n] for row in rows[r:]):
        return None
    x = [Fraction(0)] * n
    for k in range(r - 1, -1, -1):
        row, c = rows[k], pivots[k]
        acc = Fraction(row[n]) - sum(Fraction(row[j]) * x[j] for j in pivots[k + 1:] if row[j])
        x[c] = acc / row[c]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = tuple(tuple(row) + identity(n)[i] for i, row in enumerate(m))
    rows, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(r[n:]) for r in rows)


# -- Smith normal form ------------------------------------------------------


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return unimodular ``U``, ``V`` and diagonal ``D`` with ``U m V = D``.

    The diagonal satisfies d1 | d2 | ... and is non-negative.
    """
    nr, nc = shape(m)
    if nr == 0 or nc == 0:
        return identity(nr), as_matrix(m), identity(nc)
    d = [[int(x) for x in row] for row in m]
    u = [list(r) for r in identity(nr)]
    v = [list(r) for r in identity(nc)]

    def row_op(i, j, a, b, c, e):
        # (row_i, row_j) <- (a row_i + b row_j, c row_i + e row_j), det = +-1
        for mat in (d, u):
            ri, rj = mat[i], mat[j]
            mat[i] = [a * x + b * y for x, y in zip(ri, rj)]
            mat[j] = [c * x + e * y for x, y in zip(ri, rj)]

    def col_op(i, j, a, b, c, e):
        for mat in (d, v):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + e * y

    def ext_gcd(a, b):
        x0, x1, y0, y1 = 1, 0, 0, 1
        while b:
            q = a // b
            a, b = b, a - q * b
            x0, x1 = x1, x0 - q * x1
            y0, y1 = y1, y0 - q * y1
        return a, x0, y0

    t = 0
    while t < min(nr, nc):
        # pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if d[i][j] != 0 and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        if i != t:
            row_op(t, i, 0, 1, 1, 0)
        if j != t:
            col_op(t, j, 0, 1, 1, 0)
        while True:
            for i in range(t + 1, nr):
                if d[i][t] != 0:
                    a, b = d[t][t], d[i][t]
                    if b % a == 0:
                        row_op(t, i, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = ext_gcd(a, b)
                        row_op(t, i, x, y, -b // g, a // g)
            dirty = False
            for j in range(t + 1, nc):
                if d[t][j] != 0:
                    a, b = d[t][t], d[t][j]
                    if b % a == 0:
                        col_op(t, j, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = ext_gcd(a, b)
                        col_op(t, j, x, y, -b // g, a // g)
                        dirty = True
            if dirty and any(d[i][t] != 0 for i in range(t + 1, nr)):
                continue
            piv = d[t][t]
            bad = next((i for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if d[i][j] % piv != 0), None)
            if bad is None:
                break
            # fold the offending row into the pivot row; gcd step shrinks the pivot
            row_op(t, bad, 1, 1, 0, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return as_matrix(u), as_matrix(d), as_matrix(v)


def invariant_factors(m: Matrix) -> list[int]:
    _, d, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(shape(d))) if d[i][i] != 0]


def lattice_index(generators: Matrix) -> int:
    """Index of the lattice spanned by the rows in its saturation.

    For a square matrix this is ``|det|``; for a simplicial cone it is the
    multiplicity.
    """
    gens = as_matrix(generators)
    if not gens:
        return 1
    k, n = shape(gens)
    if k == n or k == n - 1:
        # gcd of the maximal minors is the product of the invariant factors
        g = 0
        for skip in range(n) if k < n else (None,):
            g = gcd(g, int(det(tuple(tuple(x for j, x in enumerate(r) if j != skip) for r in gens))))
        if g == 0:
            raise DependentGenerators(f"{k} generators of rank {rank(gens)}")
        return g
    if rank(gens) < len(gens):
        raise DependentGenerators(f"{len(gens)} generators of rank {rank(gens)}")
    out = 1
    for f in invariant_factors(gens):
        out *= f
    return out


def integer_kernel(m: Matrix, ncols: int | None = None) -> list[tuple[int, ...]]:
    """A lattice basis of ``{x in Z^n : m x = 0}`` (saturated by construction)."""
    if not m:
        n = ncols or 0
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    n = len(m[0])
    # clear denominators row by row
    rows = [primitive(r) if any(r) else tuple(0 for _ in r) for r in m]
    _, d, v = smith_normal_form(rows)
    r = len([i for i in range(min(shape(d))) if d[i][i] != 0])
    vt = transpose(v)
    return [tuple(vt[j]) for j in range(r, n)]


def saturate(vectors: Sequence[Sequence], n: int) -> list[tuple[int, ...]]:
    """Lattice basis of ``span_Q(vectors) ∩ Z^n``."""
    vecs = [tuple(x) for x in vectors if any(x)]
    if not vecs:
        return []
    perp = integer_kernel(as_matrix(vecs), n)
    if not perp:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return integer_kernel(as_matrix(perp), n)


def orthogonal_complement(vectors: Sequence[Sequence], n: int) -> list[tuple[int, ...]]:
    """Integer basis of the annihilator of ``vectors`` in the dual lattice."""
    vecs = [tuple(x) for x in vectors if any(x)]
    return integer_kernel(as_matrix(vecs), n) if vecs else [
        tuple(int(i == j) for j in range(n)) for i in range(n)]


def in_span(v: Sequence, vectors: Sequence[Sequence]) -> bool:
    if not any(v):
        return True
    if not vectors:
        return False
    return rank(as_matrix(list(vectors) + [tuple(v)])) == rank(as_matrix(vectors))
