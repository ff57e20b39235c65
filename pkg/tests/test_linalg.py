import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from folmmp import linalg as la

small = st.integers(min_value=-6, max_value=6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)))


def test_snf_textbook_example():
    # diag(2, 6, 12) is the classical answer for this matrix
    m = ((2, 4, 4), (-6, 6, 12), (10, -4, -16))
    u, d, v = la.smith_normal_form(m)
    assert d == ((2, 0, 0), (0, 6, 0), (0, 0, 12))
    assert la.matmul(la.matmul(u, m), v) == d
    assert la.invariant_factors(m) == [2, 6, 12]


@given(matrices())
def test_snf_factorisation_and_divisibility(rows):
    m = la.as_matrix(rows)
    u, d, v = la.smith_normal_form(m)
    assert la.matmul(la.matmul(u, m), v) == d
    assert abs(la.det(u)) == 1 and abs(la.det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)


@given(matrices())
def test_invariant_factors_match_sympy(rows):
    ours = [x for x in la.invariant_factors(la.as_matrix(rows)) if x]
    theirs = sympy_snf(sympy.Matrix(rows))
    ref = sorted(abs(int(theirs[i, i])) for i in range(min(theirs.shape)) if theirs[i, i] != 0)
    assert sorted(ours) == ref


@given(matrices(5, 5))
def test_rank_and_nullspace(rows):
    m = la.as_matrix(rows)
    r = la.rank(m)
    assert r == sympy.Matrix(rows).rank()
    ker = la.nullspace(m)
    assert len(ker) == len(rows[0]) - r
    for v in ker:
        assert all(x == 0 for x in la.matvec(m, v))


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_sympy(rows):
    assert la.det(la.as_matrix(rows)) == sympy.Matrix(rows).det()


@given(matrices(4, 4), st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5), min_size=4, max_size=4))
def test_solve_rational(rows, rhs):
    m = la.as_matrix(rows)
    b = rhs[:len(rows)]
    sol = la.solve_rational(m, b)
    aug = sympy.Matrix(rows).row_join(sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in b]))
    consistent = sympy.Matrix(rows).rank() == aug.rank()
    assert (sol is not None) == consistent
    if sol is not None:
        assert la.matvec(m, sol) == tuple(b)


def test_lattice_index_examples():
    assert la.lattice_index(((1, 0), (1, 2))) == 2
    assert la.lattice_index(((1, 0, 1), (0, 1, 1), (1, 1, 1))) == 1
    # a sublattice of rank 1 in Z^2: saturated iff primitive
    assert la.lattice_index(((2, 4),)) == 2
    assert la.lattice_index(((1, 3),)) == 1


@given(matrices(3, 4))
def test_lattice_index_is_gcd_of_minors(rows):
    m = la.as_matrix(rows)
    if la.rank(m) < len(rows):
        return
    import itertools
    k, n = len(rows), len(rows[0])
    g = 0
    for cols in itertools.combinations(range(n), k):
        g = sympy.gcd(g, sympy.Matrix([[r[c] for c in cols] for r in rows]).det())
    assert la.lattice_index(m) == abs(int(g))


@given(st.lists(small, min_size=1, max_size=5).filter(any))
def test_primitive(v):
    p = la.primitive(v)
    assert la.is_primitive(p)
    ratio = {Fraction(a, b) for a, b in zip(v, p) if b}
    assert len(ratio) == 1 and ratio.pop() > 0


def test_saturate_and_complement():
    assert la.lattice_index(la.as_matrix(la.saturate([(2, 0, 2)], 3))) == 1
    sat = la.saturate([(1, 1, 0), (1, -1, 0)], 3)
    assert len(sat) == 2 and la.in_span((1, 0, 0), sat)
    comp = la.orthogonal_complement([(1, 0, 1), (0, 1, 1)], 3)
    assert [tuple(abs(x) for x in c) for c in comp] == [(1, 1, 1)]


def test_integer_kernel_is_integral_basis():
    ker = la.integer_kernel(((1, 1, 1),), 3)
    assert len(ker) == 2
    assert all(isinstance(x, int) for v in ker for x in v)
    assert la.lattice_index(la.as_matrix(ker)) == 1


def test_inverse_roundtrip():
    rng = random.Random(5)
    for _ in range(50):
        m = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]
        if la.det(m) == 0:
            continue
        inv = la.inverse(m)
        assert la.matmul(m, inv) == la.identity(3)


def test_det_rejects_non_square():
    with pytest.raises(ValueError):
        la.det(((1, 2),))
