"""Toric foliations given by rational subspaces ``W`` of ``N_Q``.

A ray divisor is non-invariant (epsilon = 1) exactly when its generator
lies in ``W``.  Discrepancies use the support-function convention of
:mod:`folmmp.toric`: for an exceptional divisor ``E_w`` over the class
``D = K_F + B + M`` one has ``a(E_w) = phi_D(w) - [w in W]``.
"""
from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional, Sequence

from . import linalg as la
from .lp import strict_feasibility
from .polyhedral import Fan, NonSimplicial, NotInSupport, cone_pushforward, star_subdivision
from .toric import ToricDivisor, canonical_divisor, cartier_data, is_nef, pullback


class BoundaryOutOfRange(ValueError):
    pass


class NotEquidimensional(ValueError):
    pass


@dataclass(frozen=True)
class ToricFoliation:
    lattice_rank: int
    basis: tuple[tuple[int, ...], ...]
    normals: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        basis = tuple(tuple(v) for v in la.saturate(self.basis, self.lattice_rank))
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "normals", tuple(la.orthogonal_complement(basis, self.lattice_rank)))

    @classmethod
    def full(cls, n: int) -> "ToricFoliation":
        return cls(n, la.identity(n))

    @classmethod
    def zero(cls, n: int) -> "ToricFoliation":
        return cls(n, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def corank(self) -> int:
        return self.lattice_rank - self.rank

    def contains(self, v: Sequence) -> bool:
        return all(la.dot(h, v) == 0 for h in self.normals)

    def epsilon(self, v: Sequence) -> int:
        return int(self.contains(v))


def epsilon(f: Fan, fol: ToricFoliation, ray: int) -> int:
    return fol.epsilon(f.rays[ray])


@lru_cache(maxsize=16384)
def foliated_canonical(f: Fan, fol: ToricFoliation) -> ToricDivisor:
    return ToricDivisor(tuple(-fol.epsilon(r) for r in f.rays))


@dataclass(frozen=True)
class FoliatedPair:
    """Foliation with boundary and an optional concrete nef moduli divisor."""
    foliation: ToricFoliation
    boundary: ToricDivisor
    moduli: Optional[ToricDivisor] = None

    @classmethod
    def on(cls, f: Fan, fol: ToricFoliation, boundary: ToricDivisor | None = None,
           moduli: ToricDivisor | None = None) -> "FoliatedPair":
        pair = cls(fol, boundary if boundary is not None else ToricDivisor.zero(f.n_rays), moduli)
        check_pair(f, pair)
        return pair

    def log_class(self, f: Fan) -> ToricDivisor:
        return _log_class(self, f)


@lru_cache(maxsize=16384)
def _log_class(pair: FoliatedPair, f: Fan) -> ToricDivisor:
    d = foliated_canonical(f, pair.foliation) + pair.boundary
    return d + pair.moduli if pair.moduli is not None else d


def check_pair(f: Fan, pair: FoliatedPair) -> None:
    if len(pair.boundary) != f.n_rays:
        raise ValueError("boundary does not match the fan")
    for i, (c, r) in enumerate(zip(pair.boundary.coeffs, f.rays)):
        if not 0 <= c <= pair.foliation.epsilon(r):
            raise BoundaryOutOfRange(
                f"boundary coefficient {c} on ray {i} outside [0, epsilon={pair.foliation.epsilon(r)}]")
    if pair.moduli is not None:
        if len(pair.moduli) != f.n_rays:
            raise ValueError("moduli divisor does not match the fan")
        if not is_nef(f, pair.moduli):
            raise ValueError("moduli divisor is not nef")


# -- dicriticality ----------------------------------------------------------------


@dataclass(frozen=True)
class DicriticalReport:
    dicritical: bool
    witnesses: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()

    @property
    def witness(self):
        return self.witnesses[0] if self.witnesses else None


def relint_meets(f: Fan, fol: ToricFoliation, cone: Sequence[int]) -> Optional[tuple[int, ...]]:
    """A lattice point of ``relint(cone) ∩ W``, or None."""
    gens = f.cone_rays(cone)
    if not fol.normals:
        return la.primitive([sum(g[i] for g in gens) for i in range(f.lattice_rank)])
    eq = [[la.dot(h, g) for g in gens] for h in fol.normals]
    lam = strict_feasibility(eq, range(len(gens)), len(gens))
    if lam is None:
        return None
    # a rational point of a rational subspace scales to a lattice point on the same ray
    return la.primitive([sum(l * g[i] for l, g in zip(lam, gens)) for i in range(f.lattice_rank)])


def is_dicritical(f: Fan, fol: ToricFoliation) -> DicriticalReport:
    """Flag cones ``tau`` not contained in ``W`` whose relative interior meets ``W``."""
    found = []
    for cone in f.all_cones():
        if all(fol.contains(f.rays[i]) for i in cone):
            continue
        pt = relint_meets(f, fol, cone)
        if pt is not None:
            found.append((cone, pt))
    return DicriticalReport(bool(found), tuple(found))


# -- discrepancies ------------------------------------------------------------------


def _check_exceptional(f: Fan, w: Sequence[int]) -> tuple[int, ...]:
    w = tuple(int(x) for x in w)
    if not la.is_primitive(w):
        raise ValueError(f"{w} is not primitive")
    if w in f.rays:
        raise ValueError(f"{w} is already a ray; it carries no exceptional divisor")
    if f.containing_cone(w) is None:
        raise NotInSupport(f"{w} is not in the support of the fan")
    return w


def class_discrepancy(f: Fan, fol: ToricFoliation, d: ToricDivisor, w: Sequence[int]) -> Fraction:
    """Foliated discrepancy of ``E_w`` over the (sub-)pair with log class ``d``."""
    return cartier_data(f, d).value(w) - fol.epsilon(w)


def foliated_discrepancy(f: Fan, pair: FoliatedPair, w: Sequence[int]) -> Fraction:
    w = _check_exceptional(f, w)
    return class_discrepancy(f, pair.foliation, pair.log_class(f), w)


def classical_discrepancy(f: Fan, boundary: ToricDivisor, w: Sequence[int]) -> Fraction:
    """Discrepancy of ``E_w`` for the variety pair ``(X, boundary)``."""
    w = _check_exceptional(f, w)
    return cartier_data(f, canonical_divisor(f) + boundary).value(w) - 1


def pullback_to_subdivision(f: Fan, d: ToricDivisor, w: Sequence[int]) -> tuple[Fan, ToricDivisor]:
    """Star-subdivide at ``w`` and pull ``d`` back; the support function is unchanged."""
    y = star_subdivision(f, w)
    coeff = -cartier_data(f, d).value(w)
    return y, ToricDivisor(d.coeffs + (coeff,))


class FlcStatus(str, enum.Enum):
    CERTIFIED_FLC = "Certified_FLC"
    STRICTLY_LC_WITNESS = "Strictly_LC_witness"
    NOT_LC_WITNESS = "Not_LC_witness"
    FLC_UP_TO_DEPTH = "FLC_up_to_depth"


@dataclass(frozen=True)
class FlcReport:
    status: FlcStatus
    lc_places: tuple[tuple[int, ...], ...] = ()
    witness: Optional[tuple[int, ...]] = None
    witness_discrepancy: Optional[Fraction] = None
    sampled: int = 0

    @property
    def strictly_lc(self) -> bool:
        """Some lc place is non-invariant, so the pair is lc but not canonical."""
        return bool(self.lc_places)


def _integer_inverse(gens: Sequence[Sequence[int]]) -> tuple[list[list[int]], int]:
    """``(adj, det)`` with ``adj @ x == det * coordinates of x`` and ``det > 0``."""
    inv = la.inverse(la.transpose(la.as_matrix(gens)))
    det = 1
    for row in inv:
        for c in row:
            det = det * c.denominator // gcd(det, c.denominator)
    return [[int(c * det) for c in row] for row in inv], det


def parallelepiped_points(gens: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Nonzero lattice points of the half-open fundamental parallelepiped of a simplicial cone."""
    n = len(gens[0])
    adj, det = _integer_inverse(gens)
    lo = [sum(min(0, g[i]) for g in gens) for i in range(n)]
    hi = [sum(max(0, g[i]) for g in gens) for i in range(n)]
    out = []
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if not any(x):
            continue
        if all(0 <= sum(a * v for a, v in zip(row, x)) < det for row in adj):
            out.append(tuple(x))
    return out


def _sample_cone(f: Fan, fol: ToricFoliation, d: ToricDivisor, cone: tuple[int, ...],
                 m: tuple, depth: int):
    gens = f.cone_rays(cone)
    n = f.lattice_rank
    if len(gens) != n:
        return []
    adj, _ = _integer_inverse(gens)
    pts = set(parallelepiped_points(gens))
    for x in itertools.product(range(-depth, depth + 1), repeat=n):
        if any(x) and all(sum(a * v for a, v in zip(row, x)) >= 0 for row in adj):
            pts.add(x)
    rays = set(f.rays)
    out = []
    for x in sorted(pts):
        if x in rays or not la.is_primitive(x):
            continue
        eps = fol.epsilon(x)
        out.append((x, Fraction(la.dot(m, x)) - eps, eps))
    return out


def classify_flc(f: Fan, pair: FoliatedPair, depth: int = 5, jobs: int = 1) -> FlcReport:
    """Foliated log canonicity: certified when B = M = 0, sampled otherwise.

    Sampling covers every primitive lattice point of sup-norm height at most
    ``depth`` in each maximal cone plus the fundamental-parallelepiped points
    (a superset of the Hilbert basis).
    """
    if not f.is_simplicial:
        raise NonSimplicial("classify_flc needs a simplicial fan")
    d = pair.log_class(f)
    cd = cartier_data(f, d)
    work = list(zip(f.cones, cd.functionals))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(lambda cm: _sample_cone(f, pair.foliation, d, cm[0], cm[1], depth), work))
    else:
        chunks = [_sample_cone(f, pair.foliation, d, c, m, depth) for c, m in work]
    seen: dict[tuple[int, ...], tuple[Fraction, int]] = {}
    for chunk in chunks:
        for x, a, eps in chunk:
            seen.setdefault(x, (a, eps))
    lc_places = tuple(sorted(x for x, (a, eps) in seen.items() if a == -eps and eps == 1))
    bad = sorted((a + eps, x, a) for x, (a, eps) in seen.items() if a < -eps)
    trivial = pair.boundary.is_zero() and (pair.moduli is None or pair.moduli.is_zero())
    if bad:
        _, x, a = bad[0]
        return FlcReport(FlcStatus.NOT_LC_WITNESS, lc_places, x, a, len(seen))
    if trivial:
        return FlcReport(FlcStatus.CERTIFIED_FLC, lc_places, sampled=len(seen))
    return FlcReport(FlcStatus.FLC_UP_TO_DEPTH, lc_places, sampled=len(seen))


# -- induced foliation on the base of a fibration ---------------------------------------


@dataclass(frozen=True)
class InducedFoliation:
    foliation: ToricFoliation
    ramification: ToricDivisor
    is_pullback: bool

    def __iter__(self):
        return iter((self.foliation, self.ramification))


def _maps_onto_cone(linear_map, f_src: Fan, f_tgt: Fan, cone) -> bool:
    k = f_tgt.lattice_rank
    if k == 0:
        return True
    img = cone_pushforward(linear_map, f_src.cone_rays(cone))
    target = set(img.generators)
    for c in f_tgt.all_cones() + [()]:
        if set(f_tgt.cone_rays(c)) == target:
            return True
    return False


def induced_foliation_on_base(linear_map, fol: ToricFoliation, f_src: Fan, f_tgt: Fan) -> InducedFoliation:
    """Push ``W`` forward and compute the ramification divisor of the fibration.

    ``R = sum (f^*P - f^{-1}P)`` over invariant target rays ``P``; a source
    ray mapping to ``l`` times the generator of ``P`` contributes ``(l-1) D``.
    When ``W`` is the preimage of ``W_tgt`` the canonical bundle identity
    ``K_F ~ f^*K_G + K_X - f^*K_Y - R`` is checked exactly.
    """
    m = la.as_matrix(linear_map)
    k = f_tgt.lattice_rank
    for c in f_src.cones:
        if not _maps_onto_cone(m, f_src, f_tgt, c):
            raise NotEquidimensional(f"cone {c} does not map onto a cone of the target")
    images = [la.matvec(m, v) for v in fol.basis] if k else []
    fol_tgt = ToricFoliation(k, tuple(la.saturate(images, k)) if k else ())
    coeffs = [Fraction(0)] * f_src.n_rays
    for r, v in enumerate(f_src.rays):
        img = la.matvec(m, v) if k else ()
        if not img or not any(img):
            continue
        u = la.primitive(img)
        if u in f_tgt.rays and not fol_tgt.contains(u):
            length = next(x // y for x, y in zip(img, u) if y)
            coeffs[r] = Fraction(length - 1)
    ram = ToricDivisor(tuple(coeffs))
    kernel = la.integer_kernel(m, f_src.lattice_rank) if k else [
        tuple(int(i == j) for j in range(f_src.lattice_rank)) for i in range(f_src.lattice_rank)]
    is_pb = all(fol.contains(v) for v in kernel)
    if is_pb:
        kf = foliated_canonical(f_src, fol)
        if k:
            kg = pullback(m, f_tgt, foliated_canonical(f_tgt, fol_tgt), f_src)
            ky = pullback(m, f_tgt, canonical_divisor(f_tgt), f_src)
        else:
            kg = ky = ToricDivisor.zero(f_src.n_rays)
        diff = kf - (kg + canonical_divisor(f_src) - ky - ram)
        rows = la.as_matrix(f_src.rays)
        if la.solve_rational(rows, diff.coeffs) is None:
            raise AssertionError("canonical bundle formula fails up to principal divisors")
    return InducedFoliation(fol_tgt, ram, is_pb)
