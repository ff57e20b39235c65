"""Seeded random corpus of relative simplicial fans with corank-one foliations."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import linalg as la
from .foliation import FoliatedPair, ToricFoliation
from .polyhedral import Fan, extremal_generators, star_subdivision
from .toric import ToricDivisor

BOUNDARY_LEVELS = (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1))


@dataclass(frozen=True)
class CorpusConfig:
    seed: int = 20240917
    size: int = 200
    ranks: tuple[int, ...] = (2, 3)
    max_rays: int = 9
    max_subdivisions: int = 6
    coord_bound: int = 2
    boundary_levels: tuple[Fraction, ...] = BOUNDARY_LEVELS


@dataclass(frozen=True)
class CorpusInstance:
    name: str
    fan: Fan
    foliation: ToricFoliation
    boundary: ToricDivisor

    @property
    def pair(self) -> FoliatedPair:
        return FoliatedPair(self.foliation, self.boundary)


def _base_rank2(rng: random.Random, bound: int) -> Fan:
    a, b = sorted(rng.sample(range(-bound, bound + 1), 2))
    return Fan(2, ((a, 1), (b, 1)), ((0, 1),), relative=True)


def _convex_position(pts) -> bool:
    # each point outside the triangle of the others, and no three collinear
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            for k in range(j + 1, len(pts)):
                a, b, c = pts[i], pts[j], pts[k]
                if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) == 0:
                    return False
    return len(extremal_generators([(x, y, 1) for x, y in pts])) == len(pts)


def _base_rank3(rng: random.Random, bound: int) -> Fan:
    coords = range(-bound, bound + 1)
    while True:
        k = rng.choice((3, 4))
        pts = [(rng.choice(coords), rng.choice(coords)) for _ in range(k)]
        if len(set(pts)) < k or not _convex_position(pts):
            continue
        rays = tuple((x, y, 1) for x, y in pts)
        if k == 3:
            return Fan(3, rays, ((0, 1, 2),), relative=True)
        # order the quadrilateral around its centroid, then split along a diagonal
        cx = sum(p[0] for p in pts) / 4
        cy = sum(p[1] for p in pts) / 4
        order = sorted(range(4), key=lambda i: math.atan2(pts[i][1] - cy, pts[i][0] - cx))
        a, b, c, d = order
        cones = ((a, b, c), (a, c, d)) if rng.random() < 0.5 else ((a, b, d), (b, c, d))
        return Fan(3, rays, cones, relative=True)


def _random_subdivision(rng: random.Random, f: Fan) -> Fan | None:
    cone = rng.choice(f.cones)
    coeffs = [rng.randint(0, 2) for _ in cone]
    if sum(1 for c in coeffs if c) < 2:
        return None
    v = la.primitive([sum(c * f.rays[r][i] for c, r in zip(coeffs, cone)) for i in range(f.lattice_rank)])
    if v in f.rays:
        return None
    return star_subdivision(f, v)


def _random_foliation(rng: random.Random, f: Fan, bound: int) -> ToricFoliation:
    n = f.lattice_rank
    if rng.random() < 0.5 and f.n_rays >= n - 1:
        picks = rng.sample(f.rays, n - 1)
        if la.rank(la.as_matrix(picks)) == n - 1:
            return ToricFoliation(n, tuple(picks))
    while True:
        h = tuple(rng.randint(-bound, bound) for _ in range(n))
        if any(h):
            return ToricFoliation(n, tuple(la.integer_kernel((h,), n)))


def random_instance(rng: random.Random, cfg: CorpusConfig, name: str) -> CorpusInstance:
    rank = rng.choice(cfg.ranks)
    f = _base_rank2(rng, cfg.coord_bound) if rank == 2 else _base_rank3(rng, cfg.coord_bound)
    for _ in range(rng.randint(1, cfg.max_subdivisions)):
        if f.n_rays >= cfg.max_rays:
            break
        g = _random_subdivision(rng, f)
        if g is not None:
            f = g
    fol = _random_foliation(rng, f, cfg.coord_bound)
    coeffs = tuple(rng.choice(cfg.boundary_levels) if fol.contains(r) else Fraction(0) for r in f.rays)
    return CorpusInstance(name, f, fol, ToricDivisor(coeffs))


@lru_cache(maxsize=8)
def build_corpus(cfg: CorpusConfig = CorpusConfig()) -> tuple[CorpusInstance, ...]:
    rng = random.Random(cfg.seed)
    return tuple(random_instance(rng, cfg, f"fan{i:03d}") for i in range(cfg.size))
