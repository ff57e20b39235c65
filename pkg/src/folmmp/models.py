"""Minimal models, flop connections, the cone-length audit and chamber decompositions."""
from __future__ import annotations

import itertools
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from . import toric
from .foliation import FlcStatus, FoliatedPair, ToricFoliation, classify_flc, foliated_canonical
from .mmp import (ExtremalRay, First, MmpStep, MoriFiberSpace, NotLC, StepCapExceeded, StepKind,
                  FanRepeated, flip, mmp_step, negative_extremal_walls, run_mmp)
from .polyhedral import Fan, Wall, walls
from .polytope import Polytope, project_out
from .toric import (ToricDivisor, ample_divisor, canonical_divisor, cartier_data,
                    intersection_number, is_ample, is_extremal, is_nef, transport)

CONE_LENGTH_BOUND = -6


class NotSameGraph(ValueError):
    pass


class CertifiedStepNotTrivial(AssertionError):
    pass


class NotAmple(ValueError):
    pass


# -- model graphs ------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelNode:
    fan: Fan
    pair: FoliatedPair
    wall_values: tuple[Fraction, ...]
    provenance: tuple[MmpStep, ...]
    flops: tuple[Wall, ...] = ()

    @property
    def key(self):
        return self.fan.key()

    @property
    def ray_set(self) -> frozenset:
        return frozenset(self.fan.rays)


@dataclass(frozen=True)
class FlopEdge:
    source: int
    target: int
    wall: Wall


@dataclass(frozen=True)
class ModelGraph:
    root: Fan
    pair: FoliatedPair
    nodes: tuple[ModelNode, ...]
    edges: tuple[FlopEdge, ...]
    fiber_outcomes: tuple[MoriFiberSpace, ...] = ()
    states: int = 0
    extra: Optional[ToricDivisor] = None

    def index(self, fan: Fan) -> int:
        for i, n in enumerate(self.nodes):
            if n.fan.same_as(fan):
                return i
        raise KeyError("fan is not a node of this graph")

    def components(self) -> dict[frozenset, list[int]]:
        out: dict[frozenset, list[int]] = {}
        for i, n in enumerate(self.nodes):
            out.setdefault(n.ray_set, []).append(i)
        return out

    @cached_property
    def _adjacency(self) -> dict[int, list[tuple[int, Wall]]]:
        adj: dict[int, list[tuple[int, Wall]]] = {}
        for e in self.edges:
            adj.setdefault(e.source, []).append((e.target, e.wall))
        return adj

    def neighbours(self, i: int) -> list[tuple[int, Wall]]:
        return self._adjacency.get(i, [])


def _class(f: Fan, pair: FoliatedPair, extra: Optional[ToricDivisor]) -> ToricDivisor:
    d = pair.log_class(f)
    return d + extra if extra is not None else d


def _check_acyclic(succ: dict) -> None:
    indeg = {k: 0 for k in succ}
    for outs in succ.values():
        for t in outs:
            indeg[t] = indeg.get(t, 0) + 1
    queue = deque(k for k, v in indeg.items() if v == 0)
    done = 0
    while queue:
        k = queue.popleft()
        done += 1
        for t in succ.get(k, ()):
            indeg[t] -= 1
            if indeg[t] == 0:
                queue.append(t)
    if done != len(indeg):
        raise FanRepeated("some MMP branch revisits a fan")


def _flop_rays(f: Fan, d: ToricDivisor) -> list[ExtremalRay]:
    out, seen = [], set()
    for w in walls(f):
        if w.relation in seen:
            continue
        seen.add(w.relation)
        ray = ExtremalRay.of(f, d, w)
        if ray.value == 0 and len(ray.negative) >= 2 and is_extremal(f, w):
            out.append(ray)
    return out


def enumerate_models(f: Fan, pair: FoliatedPair, cap: int = 10_000, flop_closure: bool = False,
                     extra: ToricDivisor | None = None, check_lc: bool = True) -> ModelGraph:
    """Follow every negative extremal wall at every step; collect the nef end states.

    Branch termination is checked on the whole transition graph: it must be
    acyclic.  With ``flop_closure`` the minimal models are closed under
    flops of class-trivial walls, which adds the nef models that no MMP
    branch reaches.
    """
    if check_lc and classify_flc(f, pair).status == FlcStatus.NOT_LC_WITNESS:
        raise NotLC("the input pair is not foliated log canonical")
    start = f.key()
    states = {start: (f, pair, extra, ())}
    succ: dict = {start: []}
    queue = deque([start])
    minimal, fibers = [], []
    while queue:
        key = queue.popleft()
        cur, cur_pair, cur_extra, path = states[key]
        d = _class(cur, cur_pair, cur_extra)
        rays = negative_extremal_walls(cur, cur_pair, d)
        if not rays:
            minimal.append(key)
            continue
        for ray in rays:
            step, new, new_pair = mmp_step(cur, cur_pair, ray, d)
            if isinstance(new, MoriFiberSpace):
                fibers.append(new)
                continue
            nkey = new.key()
            succ[key].append(nkey)
            if nkey not in states:
                if len(states) >= cap:
                    raise StepCapExceeded(f"more than {cap} states")
                new_extra = transport(cur_extra, cur, new) if cur_extra is not None else None
                states[nkey] = (new, new_pair, new_extra, path + (step,))
                succ[nkey] = []
                queue.append(nkey)
    _check_acyclic(succ)
    nodes: dict = {}
    for key in minimal:
        cur, cur_pair, cur_extra, path = states[key]
        d = _class(cur, cur_pair, cur_extra)
        nodes[key] = ModelNode(cur, cur_pair, tuple(toric.wall_values(cur, d)), path)
    if flop_closure:
        queue = deque(nodes)
        while queue:
            node = nodes[queue.popleft()]
            extra_here = transport(extra, f, node.fan) if extra is not None else None
            d = _class(node.fan, node.pair, extra_here)
            for ray in _flop_rays(node.fan, d):
                new = flip(node.fan, ray)
                if new.key() in nodes:
                    continue
                new_pair = FoliatedPair(pair.foliation, transport(node.pair.boundary, node.fan, new),
                                        transport(node.pair.moduli, node.fan, new)
                                        if node.pair.moduli is not None else None)
                dn = transport(d, node.fan, new)
                if not is_nef(new, dn):
                    continue
                nodes[new.key()] = ModelNode(new, new_pair, tuple(toric.wall_values(new, dn)),
                                             node.provenance, node.flops + (ray.wall,))
                queue.append(new.key())
    order = sorted(nodes)
    node_list = tuple(nodes[k] for k in order)
    pos = {k: i for i, k in enumerate(order)}
    edges = []
    for i, node in enumerate(node_list):
        extra_here = transport(extra, f, node.fan) if extra is not None else None
        d = _class(node.fan, node.pair, extra_here)
        for ray in _flop_rays(node.fan, d):
            j = pos.get(flip(node.fan, ray).key())
            if j is not None:
                edges.append(FlopEdge(i, j, ray.wall))
    fibers.sort(key=lambda m: (m.fan.key(), m.wall.cone))
    return ModelGraph(f, pair, node_list, tuple(edges), tuple(fibers), len(states), extra)


# -- flop connections ---------------------------------------------------------------------


@dataclass(frozen=True)
class FlopPath:
    method: str
    walls: tuple[Wall, ...]
    fans: tuple[Fan, ...]
    values: tuple[Fraction, ...]
    epsilon: Optional[Fraction] = None
    cartier_index: Optional[int] = None


def _bfs_path(g: ModelGraph, a: int, b: int) -> Optional[list[tuple[int, Wall]]]:
    prev: dict[int, tuple[int, Wall]] = {}
    seen = {a}
    queue = deque([a])
    while queue:
        i = queue.popleft()
        if i == b:
            break
        for j, w in g.neighbours(i):
            if j not in seen:
                seen.add(j)
                prev[j] = (i, w)
                queue.append(j)
    if b not in seen:
        return None
    path = []
    cur = b
    while cur != a:
        i, w = prev[cur]
        path.append((i, w))
        cur = i
    return path[::-1]


def _node_class(g: ModelGraph, i: int) -> ToricDivisor:
    node = g.nodes[i]
    extra = transport(g.extra, g.root, node.fan) if g.extra is not None else None
    return _class(node.fan, node.pair, extra)


def flop_connect(g: ModelGraph, a: int, b: int, method: str = "certified") -> FlopPath:
    """Connect two models of the same graph by class-trivial flops."""
    na, nb = g.nodes[a], g.nodes[b]
    if na.ray_set != nb.ray_set:
        raise NotSameGraph("the models are not isomorphic in codimension one")
    if a == b:
        return FlopPath(method, (), (na.fan,), ())
    if method == "certified":
        path = _certified_path(g, a, b)
        if path is not None:
            if _bfs_path(g, a, b) is None:
                raise AssertionError("certified path found where the flop graph has none")
            return path
        warnings.warn("no ample class on the target model; falling back to BFS")
        method = "bfs"
    if method != "bfs":
        raise ValueError(f"unknown method {method!r}")
    path = _bfs_path(g, a, b)
    if path is None:
        raise NotSameGraph("no flop path between the models")
    fans, values = [na.fan], []
    for i, w in path:
        node = g.nodes[i]
        values.append(intersection_number(node.fan, _node_class(g, i), w))
        fans.append(g.nodes[next(j for j, ww in g.neighbours(i) if ww == w)].fan)
    return FlopPath("bfs", tuple(w for _, w in path), tuple(fans), tuple(values))


def _certified_path(g: ModelGraph, a: int, b: int) -> Optional[FlopPath]:
    na, nb = g.nodes[a], g.nodes[b]
    amp = ample_divisor(nb.fan)
    if amp is None:
        return None
    amp_a = transport(amp, nb.fan, na.fan)
    lowest = min(toric.wall_values(na.fan, amp_a), default=Fraction(0))
    if lowest < CONE_LENGTH_BOUND:
        amp_a = amp_a * Fraction(CONE_LENGTH_BOUND, lowest)
    d = _node_class(g, a)
    k = cartier_data(na.fan, d).index
    e = Fraction(1, 6 * k + 1)
    extra = d - na.pair.log_class(na.fan) + amp_a * e
    trace = run_mmp(na.fan, na.pair, First(), check_lc=False, extra=extra)
    fans, values, ws = [na.fan], [], []
    cur_d = d
    for step in trace.steps:
        if step.kind != StepKind.FLIP:
            raise CertifiedStepNotTrivial(f"certified run took a {step.kind.value} step")
        v = intersection_number(step.fan_before, cur_d, step.wall)
        if v != 0:
            raise CertifiedStepNotTrivial(f"step on wall {step.wall.cone} has class value {v}")
        values.append(v)
        ws.append(step.wall)
        cur_d = transport(cur_d, step.fan_before, step.fan_after)
        fans.append(step.fan_after)
    if not trace.final_fan.same_as(nb.fan):
        raise AssertionError("certified flop run ended away from the target model")
    return FlopPath("certified", tuple(ws), tuple(fans), tuple(values), e, k)


# -- cone-length audit --------------------------------------------------------------------


@dataclass(frozen=True)
class AuditEntry:
    wall: Wall
    value: Fraction
    foliated_value: Fraction
    variety_value: Fraction

    @property
    def violates(self) -> bool:
        return self.foliated_value < CONE_LENGTH_BOUND

    @property
    def variety_in_interval(self) -> bool:
        return CONE_LENGTH_BOUND <= self.variety_value < 0


@dataclass(frozen=True)
class AuditReport:
    entries: tuple[AuditEntry, ...]

    @property
    def violations(self) -> tuple[AuditEntry, ...]:
        return tuple(e for e in self.entries if e.violates)

    @property
    def ok(self) -> bool:
        return not self.violations


def cone_bound_audit(f: Fan, pair: FoliatedPair) -> AuditReport:
    """Record (K_F+B+M), (K_F+B) and (K_X+B) on every negative extremal wall."""
    kf_b = foliated_canonical(f, pair.foliation) + pair.boundary
    kx_b = canonical_divisor(f) + pair.boundary
    entries = []
    for ray in negative_extremal_walls(f, pair):
        entries.append(AuditEntry(ray.wall, ray.value, intersection_number(f, kf_b, ray.wall),
                                  intersection_number(f, kx_b, ray.wall)))
    return AuditReport(tuple(entries))


# -- geography ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class Chamber:
    """Parameters where ``model`` (and the models in ``equivalent``) are minimal models.

    ``equivalent`` lists models reached from ``model`` by flops that every
    member of the family meets trivially; the family cannot tell them apart.
    """
    model: int
    fan: Fan
    polytope: Polytope
    vertices: tuple[tuple[Fraction, ...], ...]
    equivalent: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.polytope.affine_dim()


@dataclass(frozen=True)
class Geography:
    models: tuple[Fan, ...]
    chambers: tuple[Chamber, ...]
    domain: Polytope
    pseudoeffective: Polytope
    covered: bool
    disjoint: bool
    samples: tuple[tuple[Fraction, ...], ...] = ()

    def chambers_of(self, t: Sequence) -> list[int]:
        return [i for i, c in enumerate(self.chambers) if c.polytope.contains(t)]


def _affine(values_at) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Split an affine function given by its values at 0 and the unit vectors."""
    base = values_at[0]
    return base, tuple(v - base for v in values_at[1:])


def _grid(domain: Polytope, k: int, steps: int) -> list[tuple[Fraction, ...]]:
    if k == 0:
        return [()]
    vs = domain.vertices()
    lo = [min(v[i] for v in vs) for i in range(k)]
    hi = [max(v[i] for v in vs) for i in range(k)]
    axes = [sorted({lo[i] + (hi[i] - lo[i]) * Fraction(j, steps) for j in range(steps + 1)}) for i in range(k)]
    pts = {p for p in itertools.product(*axes) if domain.contains(p)}
    pts.update(vs)
    centre = tuple(sum(v[i] for v in vs) / len(vs) for i in range(k))
    pts.add(centre)
    return sorted(pts)


def _chamber(f: Fan, y: Fan, classes: Sequence[ToricDivisor], domain: Polytope) -> Polytope:
    cls_y = [transport(c, f, y) for c in classes]
    ineqs = []
    for w in walls(y):
        c0, lin = _affine([intersection_number(y, c, w) for c in cls_y])
        ineqs.append((tuple(-x for x in lin), c0))
    yrays = set(y.rays)
    for r, v in enumerate(f.rays):
        if v in yrays:
            continue
        # coefficient of the pullback from Y stays below the coefficient on X
        pb = [-cartier_data(y, c).value(v) for c in cls_y]
        p0, plin = _affine(pb)
        x0, xlin = _affine([c[r] for c in classes])
        ineqs.append((tuple(a - b for a, b in zip(plin, xlin)), x0 - p0))
    return domain.add(ineqs)


def _family_trivial_groups(f: Fan, models: Sequence[Fan], classes: Sequence[ToricDivisor]) -> list[list[int]]:
    """Partition models by flops along walls on which every family class is zero."""
    pos = {y.key(): i for i, y in enumerate(models)}
    parent = list(range(len(models)))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, y in enumerate(models):
        cls_y = [transport(c, f, y) for c in classes]
        seen = set()
        for w in walls(y):
            if w.relation in seen:
                continue
            seen.add(w.relation)
            ray = ExtremalRay.of(y, cls_y[0], w)
            if len(ray.negative) < 2 or any(intersection_number(y, c, w) for c in cls_y):
                continue
            if not is_extremal(y, w):
                continue
            j = pos.get(flip(y, ray).key())
            if j is not None:
                parent[root(j)] = root(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(models)):
        groups.setdefault(root(i), []).append(i)
    return sorted(groups.values())


def _chambers(f: Fan, models: Sequence[Fan], classes: Sequence[ToricDivisor], domain: Polytope) -> list[Chamber]:
    chambers = []
    for group in _family_trivial_groups(f, models, classes):
        idx = group[0]
        y = models[idx]
        poly = _chamber(f, y, classes, domain)
        if poly.is_empty():
            continue
        for other in group[1:]:
            q = _chamber(f, models[other], classes, domain)
            if not (q.contains_polytope(poly) and poly.contains_polytope(q)):
                raise AssertionError("family-trivial flop changed the chamber")
        chambers.append(Chamber(idx, y, poly, tuple(poly.vertices()), tuple(group[1:])))
    return chambers


def geography(f: Fan, fol: ToricFoliation, family: Sequence[ToricDivisor], ample: ToricDivisor | None = None,
              base: ToricDivisor | None = None, bounds: Sequence[tuple] | None = None,
              polarization: Fraction = Fraction(0), steps: int = 2, cap: int = 10_000) -> Geography:
    """Chambers of the boundary family ``base + sum t_i F_i`` by marked minimal model.

    The chamber of a model ``Y`` is the set of admissible ``t`` for which the
    transformed class is nef on ``Y`` and ``K + Delta(t)`` on the input equals
    the pullback from ``Y`` plus an effective divisor on the contracted rays.
    """
    n = f.n_rays
    k = len(family)
    if ample is not None and not is_ample(f, ample):
        raise NotAmple("the polarization is not ample")
    base = base if base is not None else ToricDivisor.zero(n)
    moduli = ample * polarization if ample is not None and polarization else None
    eps = [fol.epsilon(r) for r in f.rays]
    bounds = bounds if bounds is not None else [(0, 1)] * k
    domain = Polytope.box([lo for lo, _ in bounds], [hi for _, hi in bounds]) if k else Polytope(0)
    rows = []
    for r in range(n):
        coeffs = tuple(fd[r] for fd in family)
        rows.append((tuple(-c for c in coeffs), base[r]))
        rows.append((coeffs, eps[r] - base[r]))
    domain = domain.add(rows)

    def boundary_at(t) -> ToricDivisor:
        out = base
        for ti, fd in zip(t, family):
            out = out + fd * ti
        return out

    def pair_at(t) -> FoliatedPair:
        return FoliatedPair(fol, boundary_at(t), moduli)

    units = [tuple(Fraction(int(i == j)) for j in range(k)) for i in range(-1, k)]
    classes = [pair_at(t).log_class(f) for t in units]

    # pseudoeffective locus: exists m with class(t) + div(chi^m) >= 0
    if f.relative or k == 0:
        pseff = domain
    else:
        c0, lin = classes[0], [c - classes[0] for c in classes[1:]]
        ineqs = []
        for r, v in enumerate(f.rays):
            # -(c0_r + sum t_i lin_i_r + <m, v>) <= 0
            ineqs.append((tuple(-l[r] for l in lin) + tuple(-x for x in v), c0[r]))
        pseff = domain.add(project_out(ineqs, k))

    # discover models on a coarse grid, then at the vertices and centroids of
    # the chambers found so far, until a round of samples adds no new model
    found: dict = {}
    sampled: set = set()

    def discover(points) -> bool:
        before = len(found)
        for t in points:
            sampled.add(t)
            for node in enumerate_models(f, pair_at(t), cap=cap, flop_closure=True, check_lc=False).nodes:
                found.setdefault(node.fan.key(), node.fan)
        return len(found) > before

    grid = _grid(domain, k, steps)
    if grid and classify_flc(f, pair_at(grid[0])).status == FlcStatus.NOT_LC_WITNESS:
        raise NotLC(f"the pair at the reference point {grid[0]} is not foliated log canonical")
    discover(grid)
    while True:
        models = tuple(found[key] for key in sorted(found))
        chambers = _chambers(f, models, classes, domain)
        pending = set()
        for c in chambers:
            pts = list(c.vertices)
            pending.update(pts)
            pending.add(tuple(sum(v[i] for v in pts) / len(pts) for i in range(k)))
        if not discover(sorted(pending - sampled)):
            break
    samples = sorted(sampled)

    disjoint = all(not P.polytope.intersect(Q.polytope).has_interior()
                   for P, Q in itertools.combinations(chambers, 2)) if k else len(chambers) <= 1
    if k and pseff.affine_dim() == k:
        covered = (sum((c.polytope.volume() for c in chambers), Fraction(0)) == pseff.volume()
                   and all(pseff.contains_polytope(c.polytope) for c in chambers))
    else:
        covered = all(any(c.polytope.contains(t) for c in chambers) for t in samples if pseff.contains(t))
    return Geography(models, tuple(chambers), domain, pseff, covered, disjoint, tuple(samples))
