"""Torus-invariant divisors on simplicial toric varieties.

Sign convention, used everywhere in the package: the Cartier datum of
``D = sum a_r D_r`` on a maximal cone ``s`` is the functional ``m_s`` with
``<m_s, v_r> = -a_r`` for the rays of ``s``.  The support function is
``phi_D(u) = <m_s, u>`` for ``u`` in ``s``, and the pullback of ``D`` to a
model with a new ray ``w`` has coefficient ``-phi_D(w)`` along it.

Intersection numbers with wall curves are pinned by three constraints:
linearity in ``D``, vanishing on principal divisors, vanishing on rays
away from the two adjacent cones, plus the normalisation
``D_u . V(tau) = mult(tau) / mult(sigma)`` for the ray ``u`` of ``sigma``
off the wall.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Mapping, Optional, Sequence

from . import linalg as la
from .lp import find_point
from .polyhedral import (Fan, Wall, extremal_generators, in_cone,
                         lineality_space, walls)

DEBUG_CHECKS = True


class NotQCartier(ValueError):
    pass


class NotAWall(ValueError):
    pass


class NotNef(ValueError):
    pass


class NotIntegral(ValueError):
    pass


class RaysDoNotSpan(ValueError):
    pass


@dataclass(frozen=True)
class ToricDivisor:
    """Rational combination of the ray divisors of one fixed fan."""
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if not all(type(c) is Fraction for c in self.coeffs) or type(self.coeffs) is not tuple:
            object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def zero(cls, n: int) -> "ToricDivisor":
        return cls((0,) * n)

    @classmethod
    def ray(cls, n: int, i: int) -> "ToricDivisor":
        return cls(tuple(int(j == i) for j in range(n)))

    @classmethod
    def from_dict(cls, n: int, coeffs: Mapping[int, object]) -> "ToricDivisor":
        out = [Fraction(0)] * n
        for i, c in coeffs.items():
            if not 0 <= int(i) < n:
                raise IndexError(f"ray index {i} out of range")
            out[int(i)] = Fraction(c)
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def _check(self, other: "ToricDivisor"):
        if len(other) != len(self):
            raise ValueError("divisors live on different fans")

    def __add__(self, other: "ToricDivisor") -> "ToricDivisor":
        self._check(other)
        return ToricDivisor(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "ToricDivisor") -> "ToricDivisor":
        self._check(other)
        return ToricDivisor(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "ToricDivisor":
        return ToricDivisor(tuple(-a for a in self.coeffs))

    def __mul__(self, s) -> "ToricDivisor":
        s = Fraction(s)
        return ToricDivisor(tuple(s * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def as_dict(self) -> dict[int, Fraction]:
        return {i: c for i, c in enumerate(self.coeffs) if c}


def canonical_divisor(f: Fan) -> ToricDivisor:
    return ToricDivisor((-1,) * f.n_rays)


def principal_divisor(f: Fan, m: Sequence) -> ToricDivisor:
    """``div(chi^m) = sum <m, v_r> D_r``."""
    return ToricDivisor(tuple(la.dot(m, r) for r in f.rays))


def transport(d: ToricDivisor, src: Fan, dst: Fan) -> ToricDivisor:
    """Move coefficients across a birational map by ray identity (strict transform)."""
    pos = {r: i for i, r in enumerate(src.rays)}
    return ToricDivisor(tuple(d[pos[r]] if r in pos else 0 for r in dst.rays))


# -- Cartier data ----------------------------------------------------------------


@dataclass(frozen=True)
class CartierData:
    fan: Fan
    divisor: ToricDivisor
    functionals: tuple[tuple[Fraction, ...], ...]
    index: int

    def value(self, u: Sequence) -> Fraction:
        """Support function ``phi_D(u)``."""
        for c, m in zip(self.fan.cones, self.functionals):
            if in_cone(u, self.fan.cone_rays(c)):
                return Fraction(la.dot(m, u))
        raise ValueError(f"{tuple(u)} is outside the support of the fan")


def _cone_index(rows, rhs) -> int:
    """Smallest k > 0 with k*rhs integral and ``rows . m = k*rhs`` solvable over Z."""
    k = 1
    for x in rhs:
        k = lcm(k, Fraction(x).denominator)
    if not rows:
        return k
    u, d, _ = la.smith_normal_form(la.as_matrix(rows))
    c = la.matvec(u, rhs)
    for i in range(min(len(d), len(d[0]))):
        if d[i][i]:
            k = lcm(k, (Fraction(c[i]) / d[i][i]).denominator)
    return k


@lru_cache(maxsize=8192)
def cartier_data(f: Fan, d: ToricDivisor) -> CartierData:
    if len(d) != f.n_rays:
        raise ValueError("divisor does not match the fan")
    funcs = []
    index = 1
    for c in f.cones:
        rows = la.as_matrix(f.cone_rays(c))
        rhs = tuple(-d[i] for i in c)
        if not rows:
            funcs.append(tuple(Fraction(0) for _ in range(f.lattice_rank)))
            continue
        m = la.solve_rational(rows, rhs)
        if m is None:
            raise NotQCartier(f"no linear functional on cone {c}")
        funcs.append(m)
        index = lcm(index, _cone_index(rows, rhs))
    # each functional takes the prescribed value -d_r on every ray of its own
    # cone, so functionals of neighbouring cones agree on shared faces
    return CartierData(f, d, tuple(funcs), index)


def support_value(f: Fan, d: ToricDivisor, u: Sequence) -> Fraction:
    return cartier_data(f, d).value(u)


def pullback_coefficient(f: Fan, d: ToricDivisor, w: Sequence) -> Fraction:
    """Coefficient of the exceptional divisor of ``w`` in the pullback of ``d``."""
    return -support_value(f, d, w)


# -- intersection numbers -----------------------------------------------------------


@lru_cache(maxsize=16384)
def wall_curve(f: Fan, w: Wall) -> tuple[Fraction, ...]:
    """The vector ``(D_r . V(tau))_r`` for the wall curve of ``w``."""
    if w not in walls(f):
        raise NotAWall(f"{w} is not a wall of this fan")
    mult_tau = la.lattice_index(la.as_matrix(f.cone_rays(w.cone)))
    sigma = f.cones[w.left]
    mult_sigma = la.lattice_index(la.as_matrix(f.cone_rays(sigma)))
    scale = Fraction(mult_tau, mult_sigma * w.relation[w.u_left])
    values = tuple(scale * b for b in w.relation)
    if DEBUG_CHECKS:
        _verify_wall_constraints(f, w, values, mult_tau)
    return values


def _verify_wall_constraints(f: Fan, w: Wall, values, mult_tau) -> None:
    # The constraint system (relation among the support rays, fixed values on
    # the two off-wall rays) has a unique solution, so substitution suffices.
    n = f.lattice_rank
    for k in range(n):
        if sum(values[r] * f.rays[r][k] for r in w.support()):
            raise AssertionError(f"wall {w.cone}: intersection values violate the linear relation")
    for u, cone in ((w.u_left, w.left), (w.u_right, w.right)):
        mult = la.lattice_index(la.as_matrix(f.cone_rays(f.cones[cone])))
        if values[u] != Fraction(mult_tau, mult):
            raise AssertionError(f"wall {w.cone}: wrong value on off-wall ray {u}")
    if any(values[r] for r in range(f.n_rays) if r not in w.support()):
        raise AssertionError(f"wall {w.cone}: nonzero value off the wall support")


def intersection_number(f: Fan, d: ToricDivisor, w: Wall) -> Fraction:
    """Exact ``D . V(tau)`` for the wall curve."""
    if len(d) != f.n_rays:
        raise ValueError("divisor does not match the fan")
    curve = wall_curve(f, w)
    return sum((d.coeffs[r] * curve[r] for r in w.support()), Fraction(0))


@lru_cache(maxsize=4096)
def _wall_table(f: Fan) -> tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]:
    # each wall curve as (support, integer coefficients, common denominator)
    out = []
    for w in walls(f):
        curve = wall_curve(f, w)
        sup = w.support()
        den = lcm(*(curve[r].denominator for r in sup))
        out.append((sup, tuple(int(curve[r] * den) for r in sup), den))
    return tuple(out)


def wall_values(f: Fan, d: ToricDivisor) -> list[Fraction]:
    """Intersection numbers with every wall curve, in the order of ``walls(f)``."""
    if len(d) != f.n_rays:
        raise ValueError("divisor does not match the fan")
    den = lcm(*(c.denominator for c in d.coeffs)) if d.coeffs else 1
    ints = [int(c * den) for c in d.coeffs]
    return [Fraction(sum(ints[r] * b for r, b in zip(sup, coeffs)), den * cden)
            for sup, coeffs, cden in _wall_table(f)]


def is_nef(f: Fan, d: ToricDivisor) -> bool:
    if f.is_simplicial:
        return all(v >= 0 for v in wall_values(f, d))
    return _convexity(f, d, strict=False)


def is_ample(f: Fan, d: ToricDivisor) -> bool:
    if f.is_simplicial:
        return all(v > 0 for v in wall_values(f, d))
    return _convexity(f, d, strict=True)


def _convexity(f: Fan, d: ToricDivisor, strict: bool) -> bool:
    """Global criterion: ``<m_s, v_r> >= -a_r`` for every cone s and ray r (strict off s)."""
    cd = cartier_data(f, d)
    for c, m in zip(f.cones, cd.functionals):
        for r, v in enumerate(f.rays):
            if r in c:
                continue
            lhs = la.dot(m, v)
            if lhs < -d[r] or (strict and lhs == -d[r]):
                return False
    return True


# -- positivity helpers --------------------------------------------------------------


@lru_cache(maxsize=4096)
def ample_divisor(f: Fan, bound: int = 1) -> Optional[ToricDivisor]:
    """Some divisor with every wall value >= ``bound`` (exact LP); None if none exists."""
    ws = walls(f)
    if not ws:
        return ToricDivisor.zero(f.n_rays)
    rows = [[-x for x in wall_curve(f, w)] for w in ws]
    x = find_point(rows, [-bound] * len(ws), n=f.n_rays)
    return None if x is None else ToricDivisor(x)


def wall_class_key(w: Wall) -> tuple[int, ...]:
    return w.relation


def supporting_divisor(f: Fan, w: Wall) -> Optional[ToricDivisor]:
    """A nef divisor vanishing exactly on the wall class of ``w``, if that class is extremal.

    Walls with the same primitive relation are the same numerical class;
    every other wall must get value >= 1.
    """
    ws = walls(f)
    a_ub, b_ub, a_eq = [], [], []
    for other in ws:
        row = list(wall_curve(f, other))
        if other.relation == w.relation:
            a_eq.append(row)
        else:
            a_ub.append([-x for x in row])
            b_ub.append(-1)
    x = find_point(a_ub, b_ub, a_eq, [0] * len(a_eq), n=f.n_rays)
    return None if x is None else ToricDivisor(x)


@lru_cache(maxsize=16384)
def is_extremal(f: Fan, w: Wall) -> bool:
    return supporting_divisor(f, w) is not None


# -- semiample fibrations --------------------------------------------------------------


@dataclass(frozen=True)
class SemiampleFibration:
    """Contraction ``N -> N/L`` defined by a nef integral Cartier divisor.

    ``source_divisor == pullback(descended) + div(chi^character)``.
    """
    linear_map: tuple[tuple[int, ...], ...]
    target: Fan
    descended: ToricDivisor
    character: tuple[Fraction, ...]


def quotient_map(kernel_basis: Sequence[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    """Surjective integer matrix ``Z^n -> Z^(n-l)`` whose kernel is the saturated span given."""
    basis = la.saturate(kernel_basis, n)
    if not basis:
        return la.identity(n)
    cols = la.transpose(la.as_matrix(basis))
    u, _, _ = la.smith_normal_form(cols)
    return tuple(u[len(basis):])


def pullback(linear_map, target: Fan, d: ToricDivisor, source: Fan) -> ToricDivisor:
    """Pull a Q-Cartier divisor back along a toric morphism."""
    cd = cartier_data(target, d)
    out = []
    for v in source.rays:
        img = la.matvec(la.as_matrix(linear_map), v) if linear_map else ()
        out.append(-cd.value(img) if img and any(img) else Fraction(0))
    return ToricDivisor(tuple(out))


def semiample_fibration(f: Fan, d: ToricDivisor) -> SemiampleFibration:
    cd = cartier_data(f, d)
    if cd.index != 1:
        raise NotIntegral(f"Cartier index {cd.index}; scale the divisor first")
    if not is_nef(f, d):
        raise NotNef("the divisor is not nef")
    n = f.lattice_rank
    domains: dict[tuple, list[int]] = {}
    for k, m in enumerate(cd.functionals):
        domains.setdefault(m, []).append(k)
    gens_of = {m: sorted({r for k in ks for r in f.cones[k]}) for m, ks in domains.items()}
    lin = None
    for m, rs in gens_of.items():
        space = lineality_space(f.cone_rays(rs))
        if lin is None:
            lin = space
        elif len(space) != len(lin) or la.rank(la.as_matrix(list(lin) + list(space))) != len(lin):
            raise AssertionError("linearity domains have different lineality spaces")
    lin = lin or []
    kernel = [la.primitive(v) for v in lin]
    p = quotient_map(kernel, n)
    k = len(p)
    # characters: split m = alpha*Q + beta*P with U = [Q; P] unimodular
    if kernel:
        basis = la.saturate(kernel, n)
        u, _, _ = la.smith_normal_form(la.transpose(la.as_matrix(basis)))
        u_inv = la.inverse(u)
        l = len(basis)
    else:
        u, u_inv, l = la.identity(n), la.identity(n), 0
    shift = None
    target_funcs = {}
    for m in domains:
        c = la.matvec(la.transpose(u_inv), m)  # m = c . U
        alpha, beta = c[:l], c[l:]
        m0 = tuple(sum(a * u[i][j] for i, a in enumerate(alpha)) for j in range(n))
        if shift is None:
            shift = m0
        elif shift != m0:
            raise AssertionError("domains disagree on the lineality space")
        target_funcs[m] = tuple(beta)
    rays: set[tuple[int, ...]] = set()
    cone_gens = {}
    for m, rs in gens_of.items():
        imgs = [la.matvec(p, f.rays[r]) for r in rs] if k else []
        ext = extremal_generators(imgs) if k else []
        cone_gens[m] = ext
        rays.update(ext)
    ray_list = sorted(rays)
    pos = {r: i for i, r in enumerate(ray_list)}
    support = None
    if f.relative and k:
        support = tuple(extremal_generators([la.matvec(p, g) for g in f.support]))
    target = Fan(k, tuple(ray_list), [tuple(pos[r] for r in cone_gens[m]) for m in domains],
                 relative=f.relative and bool(k), support=support)
    coeffs = [Fraction(0)] * len(ray_list)
    for m in domains:
        for r in cone_gens[m]:
            coeffs[pos[r]] = -Fraction(la.dot(target_funcs[m], r))
    descended = ToricDivisor(tuple(coeffs))
    character = tuple(-x for x in shift) if shift is not None else (Fraction(0),) * n
    back = pullback(p, target, descended, f) + principal_divisor(f, character)
    if back != d:
        raise AssertionError("pullback of the descended divisor does not reproduce the input")
    if target.cones != ((),) and not is_ample(target, descended):
        raise AssertionError("descended divisor is not ample on the target")
    return SemiampleFibration(p, target, descended, character)


# -- class group ----------------------------------------------------------------------------


def class_group(f: Fan) -> tuple[int, list[int]]:
    """(free rank, torsion invariants) of the cokernel of ``M -> Z^rays``."""
    mat = la.as_matrix(f.rays)
    if la.rank(mat) < f.lattice_rank:
        raise RaysDoNotSpan("rays do not span N_Q")
    factors = la.invariant_factors(mat)
    return f.n_rays - f.lattice_rank, [x for x in factors if x > 1]
