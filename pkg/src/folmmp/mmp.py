"""Extremal walls, circuit surgery and the foliated MMP driver.

A wall class is the primitive relation ``sum_{J+} b_i v_i = sum_{J-} |b_j| v_j``.
All walls carrying the same relation are the same curve class; a contraction
acts on the whole class at once.  The maximal cones touched by a class are
``(J - {j}) ∪ nu`` for ``j`` in ``J+``; a flip swaps them for the ``j in J-``
family, a divisorial contraction (``J- = {c}``) does the same and drops ``c``,
and a fiber-type contraction (``J-`` empty) quotients by ``span(J)``.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import linalg as la
from . import toric
from .foliation import FlcStatus, FoliatedPair, InducedFoliation, classify_flc, induced_foliation_on_base
from .polyhedral import Fan, NonSimplicial, Wall, cone_pushforward, extremal_generators, validate_fan, walls
from .toric import ToricDivisor, intersection_number, is_extremal, is_nef, quotient_map


class NotFlipping(ValueError):
    pass


class NotDivisorial(ValueError):
    pass


class NotFiberType(ValueError):
    pass


class NotExtremal(ValueError):
    pass


class NotLC(ValueError):
    pass


class ResultNotSimplicial(AssertionError):
    pass


class TerminationViolation(AssertionError):
    pass


class StepCapExceeded(TerminationViolation):
    pass


class FanRepeated(TerminationViolation):
    pass


class StepKind(str, enum.Enum):
    DIVISORIAL = "Divisorial"
    FLIP = "Flip"
    FIBER_TYPE = "FiberType"
    DONE = "Done"


@dataclass(frozen=True)
class ExtremalRay:
    wall: Wall
    value: Fraction
    sign_partition: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    @classmethod
    def of(cls, f: Fan, d: ToricDivisor, w: Wall) -> "ExtremalRay":
        return cls(w, intersection_number(f, d, w), w.sign_partition())

    @property
    def relation(self) -> tuple[int, ...]:
        return self.wall.relation

    @property
    def negative(self) -> tuple[int, ...]:
        return self.sign_partition[0]

    @property
    def positive(self) -> tuple[int, ...]:
        return self.sign_partition[2]


@dataclass(frozen=True)
class Contraction:
    kind: StepKind
    removed: Optional[int] = None


def log_class(f: Fan, pair: FoliatedPair) -> ToricDivisor:
    return pair.log_class(f)


def negative_extremal_walls(f: Fan, pair: FoliatedPair, d: ToricDivisor | None = None) -> list[ExtremalRay]:
    """One representative wall per extremal class with negative value, sorted by wall."""
    if not f.is_simplicial:
        raise NonSimplicial("the MMP runs on simplicial fans")
    d = pair.log_class(f) if d is None else d
    out, seen = [], set()
    for w, value in zip(walls(f), toric.wall_values(f, d)):
        if w.relation in seen:
            continue
        if value < 0 and is_extremal(f, w):
            seen.add(w.relation)
            out.append(ExtremalRay(w, value, w.sign_partition()))
    return out


def classify_contraction(ray: ExtremalRay) -> Contraction:
    neg = ray.negative
    if not neg:
        return Contraction(StepKind.FIBER_TYPE)
    if len(neg) == 1:
        return Contraction(StepKind.DIVISORIAL, neg[0])
    return Contraction(StepKind.FLIP)


# -- surgery ---------------------------------------------------------------------------


def _class_links(f: Fan, ray: ExtremalRay) -> list[tuple[int, ...]]:
    """The ``nu`` parts of every wall in the class of ``ray``."""
    links = {w.sign_partition()[1] for w in walls(f) if w.relation == ray.relation}
    return sorted(links)


def _swap(f: Fan, ray: ExtremalRay, new_side: Sequence[int]) -> tuple[set, list]:
    j = set(ray.negative) | set(ray.positive)
    cones = set(f.cones)
    removed, added = set(), []
    for nu in _class_links(f, ray):
        old = [tuple(sorted((j - {x}) | set(nu))) for x in ray.positive]
        missing = [c for c in old if c not in cones]
        if missing:
            raise NotExtremal(f"class of wall {ray.wall.cone} does not cover cone {missing[0]}")
        removed.update(old)
        added.extend(tuple(sorted((j - {x}) | set(nu))) for x in new_side)
    return removed, added


def _check_valid(f: Fan, what: str) -> None:
    if toric.DEBUG_CHECKS:
        report = validate_fan(f)
        if not report.ok:
            raise AssertionError(f"{what} produced an invalid fan: {report.violations[0]}")


def flip(f: Fan, ray: ExtremalRay) -> Fan:
    if classify_contraction(ray).kind != StepKind.FLIP:
        raise NotFlipping(f"wall {ray.wall.cone} is not of flipping type")
    removed, added = _swap(f, ray, ray.negative)
    out = f.with_cones([c for c in f.cones if c not in removed] + added)
    _check_valid(out, "flip")
    flipped = tuple(-x for x in ray.relation)
    if not any(w.relation == flipped for w in walls(out)):
        raise AssertionError("flipped fan lacks the opposite wall class")
    return out


def contract_divisorial(f: Fan, ray: ExtremalRay) -> Fan:
    """Remove the ray ``c`` of ``J- = {c}`` and merge its star."""
    c = classify_contraction(ray)
    if c.kind != StepKind.DIVISORIAL:
        raise NotDivisorial(f"wall {ray.wall.cone} is not of divisorial type")
    gone = c.removed
    try:
        removed, added = _swap(f, ray, ray.negative)
    except NotExtremal:
        removed, added = set(), []
    cones = [x for x in f.cones if x not in removed] + added
    leftover = [x for x in cones if gone in x]
    if leftover:
        # the class does not sweep out the star: merge what remains into one cone
        merged = tuple(sorted({r for x in leftover for r in x} - {gone}))
        if f.cone_dim(merged) != len(merged):
            raise ResultNotSimplicial(f"merging the star of ray {gone} gives a non-simplicial cone")
        cones = [x for x in cones if gone not in x] + [merged]
    keep = [i for i in range(f.n_rays) if i != gone]
    pos = {old: k for k, old in enumerate(keep)}
    out = Fan(f.lattice_rank, tuple(f.rays[i] for i in keep),
              [tuple(pos[i] for i in x) for x in cones], f.relative, f.support)
    if not out.is_simplicial:
        raise ResultNotSimplicial("divisorial contraction produced a non-simplicial fan")
    _check_valid(out, "divisorial contraction")
    return out


@dataclass(frozen=True)
class FiberContraction:
    linear_map: tuple[tuple[int, ...], ...]
    target: Fan


def contract_fiber_type(f: Fan, ray: ExtremalRay) -> FiberContraction:
    """Quotient ``N -> N / span(J)`` and push the fan forward."""
    if ray.negative:
        raise NotFiberType(f"wall {ray.wall.cone} is not of fiber type")
    n = f.lattice_rank
    j = list(ray.positive)
    p = quotient_map([f.rays[i] for i in j], n)
    k = len(p)
    if k == 0:
        return FiberContraction((), Fan(0, (), [()]))
    images = {}
    for c in f.cones:
        gens = tuple(sorted(extremal_generators([la.matvec(p, f.rays[i]) for i in c])))
        if len(gens) and cone_pushforward(p, f.cone_rays(c)).dim == k:
            images[gens] = None
    rays = sorted({g for gens in images for g in gens})
    pos = {r: i for i, r in enumerate(rays)}
    target = Fan(k, tuple(rays), [tuple(pos[g] for g in gens) for gens in images])
    _check_valid(target, "fiber-type contraction")
    return FiberContraction(p, target)


# -- driver -----------------------------------------------------------------------------


@dataclass(frozen=True)
class First:
    pass


@dataclass(frozen=True)
class Seeded:
    seed: int


@dataclass(frozen=True)
class Index:
    choices: tuple[int, ...]


Strategy = Union[First, Seeded, Index]


def parse_strategy(text: str) -> Strategy:
    if text == "first":
        return First()
    if text.startswith("seed:"):
        return Seeded(int(text[5:]))
    if text.startswith("index:"):
        body = text[6:]
        return Index(tuple(int(x) for x in body.split(",") if x.strip()))
    raise ValueError(f"unknown strategy {text!r}")


@dataclass(frozen=True)
class MmpStep:
    kind: StepKind
    wall: Optional[Wall]
    fan_before: Fan
    fan_after: Optional[Fan]
    value_before: Optional[Fraction]
    value_after: Optional[Fraction] = None


@dataclass(frozen=True)
class MinimalModel:
    fan: Fan
    pair: FoliatedPair


@dataclass(frozen=True)
class MoriFiberSpace:
    fan: Fan
    pair: FoliatedPair
    wall: Wall
    linear_map: tuple[tuple[int, ...], ...]
    target: Fan
    induced: InducedFoliation


@dataclass(frozen=True)
class MmpTrace:
    steps: tuple[MmpStep, ...]
    outcome: Union[MinimalModel, MoriFiberSpace]

    @property
    def final_fan(self) -> Fan:
        return self.outcome.fan


def _transport_pair(pair: FoliatedPair, src: Fan, dst: Fan) -> FoliatedPair:
    # strict transform: coefficients follow ray identity, contracted rays drop out
    moduli = toric.transport(pair.moduli, src, dst) if pair.moduli is not None else None
    return FoliatedPair(pair.foliation, toric.transport(pair.boundary, src, dst), moduli)


def _choose(rays: list[ExtremalRay], strategy: Strategy, step: int, rng: Optional[random.Random]) -> ExtremalRay:
    if isinstance(strategy, Seeded):
        return rng.choice(rays)
    if isinstance(strategy, Index) and step < len(strategy.choices):
        return rays[strategy.choices[step] % len(rays)]
    return rays[0]


def mmp_step(f: Fan, pair: FoliatedPair, ray: ExtremalRay, d: ToricDivisor | None = None):
    """Perform one contraction; returns ``(step, new_fan, new_pair)`` or a fiber outcome."""
    kind = classify_contraction(ray).kind
    if kind == StepKind.FIBER_TYPE:
        fib = contract_fiber_type(f, ray)
        induced = induced_foliation_on_base(fib.linear_map, pair.foliation, f, fib.target)
        step = MmpStep(kind, ray.wall, f, None, ray.value)
        return step, MoriFiberSpace(f, pair, ray.wall, fib.linear_map, fib.target, induced), None
    new = flip(f, ray) if kind == StepKind.FLIP else contract_divisorial(f, ray)
    new_pair = _transport_pair(pair, f, new)
    after = None
    if kind == StepKind.FLIP:
        dd = d if d is not None else pair.log_class(f)
        dd_new = toric.transport(dd, f, new)
        flipped = tuple(-x for x in ray.relation)
        w_new = next(w for w in walls(new) if w.relation == flipped)
        after = intersection_number(new, dd_new, w_new)
        if not (ray.value < 0 < after):
            raise AssertionError(f"flip did not change sign: {ray.value} -> {after}")
    return MmpStep(kind, ray.wall, f, new, ray.value, after), new, new_pair


def run_mmp(f: Fan, pair: FoliatedPair, strategy: Strategy = First(), cap: int = 10_000,
            check_lc: bool = True, extra: ToricDivisor | None = None) -> MmpTrace:
    """Run the (K_F + B + M)-MMP until the class is nef or a fiber contraction appears.

    ``extra`` is an additional divisor (transported by ray identity) added to
    the log class, used for MMPs twisted by an ample class.
    """
    if check_lc and classify_flc(f, pair).status == FlcStatus.NOT_LC_WITNESS:
        raise NotLC("the input pair is not foliated log canonical")
    rng = random.Random(strategy.seed) if isinstance(strategy, Seeded) else None
    steps: list[MmpStep] = []
    seen = {f.key()}
    cur, cur_pair, cur_extra = f, pair, extra
    while True:
        d = cur_pair.log_class(cur) + cur_extra if cur_extra is not None else cur_pair.log_class(cur)
        rays = negative_extremal_walls(cur, cur_pair, d)
        if not rays:
            if not is_nef(cur, d):
                raise AssertionError("no negative extremal wall but the class is not nef")
            return MmpTrace(tuple(steps), MinimalModel(cur, cur_pair))
        if len(steps) >= cap:
            raise StepCapExceeded(f"more than {cap} steps")
        ray = _choose(rays, strategy, len(steps), rng)
        step, new, new_pair = mmp_step(cur, cur_pair, ray, d)
        steps.append(step)
        if isinstance(new, MoriFiberSpace):
            return MmpTrace(tuple(steps), new)
        if new.key() in seen:
            raise FanRepeated("a fan repeated along the MMP")
        seen.add(new.key())
        if cur_extra is not None:
            cur_extra = toric.transport(cur_extra, cur, new)
        cur, cur_pair = new, new_pair
