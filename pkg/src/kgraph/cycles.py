"""Cycle structure: cyclic components, entrances, initial cycle classes, periodicity lattices."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd

import networkx as nx

from .core import KGraph, natkey
from .paths import NotStablyFinite, Path, compose, from_chain, segment, vertex


class VertexNotOnClass(ValueError):
    pass


@dataclass(frozen=True)
class CyclicComponent:
    vertices: tuple[str, ...]
    colors: tuple[int, ...]


@dataclass(frozen=True)
class EntranceWitness:
    component: CyclicComponent
    vertex: str
    color: int
    edges: tuple[str, str]
    cycle: Path


@dataclass(frozen=True, eq=False)
class InitialCycleClass:
    vertices: tuple[str, ...]
    colors: tuple[int, ...]
    lattice: tuple[tuple[int, ...], ...]
    base_point: str
    cycle: Path = field(repr=False)
    # positions[w] = m means following the unique tail from the base point
    # for degree m (entries indexed by ``colors``) lands on w
    positions: dict = field(repr=False, default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.colors)

    @property
    def trivial(self) -> bool:
        return not self.colors

    def __eq__(self, other) -> bool:
        return isinstance(other, InitialCycleClass) and (self.vertices, self.colors) == (other.vertices, other.colors)

    def __hash__(self) -> int:
        return hash((self.vertices, self.colors))


def _digraph(g: KGraph) -> nx.MultiDiGraph:
    dg = nx.MultiDiGraph()
    dg.add_nodes_from(g.vertices)
    for e in g.edges.values():
        dg.add_edge(e.range, e.source, key=e.id)
    return dg


def cyclic_components(g: KGraph) -> list[CyclicComponent]:
    """Strongly connected components (range to source) that carry at least one internal edge."""
    out = []
    for comp in nx.strongly_connected_components(_digraph(g)):
        colors = {e.color for e in g.edges.values() if e.range in comp and e.source in comp}
        if colors:
            out.append(CyclicComponent(tuple(sorted(comp, key=natkey)), tuple(sorted(colors))))
    out.sort(key=lambda c: natkey(c.vertices[0]))
    return out


def _walk(g: KGraph, inside: set[str], start: str, goal: str) -> list[str]:
    """Edge chain from start to goal using edges internal to ``inside`` (BFS)."""
    prev: dict[str, tuple[str, str] | None] = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v == goal:
            break
        for c in range(1, g.k + 1):
            for eid in g.edges_at(v, c):
                w = g.edges[eid].source
                if w in inside and w not in prev:
                    prev[w] = (v, eid)
                    queue.append(w)
    chain = []
    v = goal
    while prev[v] is not None:
        v, eid = prev[v]
        chain.append(eid)
    return chain[::-1]


def _cycle_through(g: KGraph, comp: CyclicComponent, w: str, color: int) -> Path:
    inside = set(comp.vertices)
    e = min((x for x in g.edges.values() if x.color == color and x.range in inside and x.source in inside),
            key=lambda x: natkey(x.id))
    chain = _walk(g, inside, w, e.range) + [e.id] + _walk(g, inside, e.source, w)
    return from_chain(g, chain)


def find_entrance(g: KGraph) -> EntranceWitness | None:
    """Least (component, vertex, colour) where a cycle vertex has two edges of a cycle colour."""
    for comp in cyclic_components(g):
        for w in comp.vertices:
            for c in comp.colors:
                ids = g.edges_at(w, c)
                if len(ids) >= 2:
                    return EntranceWitness(comp, w, c, (ids[0], ids[1]), _cycle_through(g, comp, w, c))
    return None


def follow(g: KGraph, v: str, degree) -> Path:
    """The unique path of the given degree with range v on a deterministic region."""
    blocks = []
    cur = v
    for c in range(1, g.k + 1):
        block = []
        for _ in range(degree[c - 1]):
            ids = g.edges_at(cur, c)
            if len(ids) != 1:
                raise ValueError(f"no unique color-{c} edge at {cur}")
            block.append(ids[0])
            cur = g.edges[ids[0]].source
        blocks.append(tuple(block))
    return Path(g, tuple(blocks), v)


def _order(perm: dict[str, str]) -> int:
    out = 1
    seen = set()
    for start in perm:
        if start in seen:
            continue
        n, v = 0, start
        while v not in seen:
            seen.add(v)
            v = perm[v]
            n += 1
        out = out * n // gcd(out, n)
    return out


def hermite_normal_form(rows, ncols: int) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Upper triangular, positive pivots, entries above a pivot reduced into
    [0, pivot).  Zero rows are dropped.
    """
    a = [list(r) for r in rows if any(r)]
    r = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][col]))
            a[r], a[piv] = a[piv], a[r]
            clean = True
            for i in range(r + 1, len(a)):
                if a[i][col]:
                    q = a[i][col] // a[r][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    clean = clean and a[i][col] == 0
            if clean:
                break
        if r < len(a) and a[r][col] != 0:
            if a[r][col] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][col] // a[r][col]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a[:r]]


def lattice_coordinates(basis, vec) -> tuple[int, ...] | None:
    """Integer coordinates of vec in a square upper-triangular basis, or None if vec is not in the lattice."""
    n = len(basis)
    rest = list(vec)
    coords = [0] * n
    for i in range(n):
        piv = basis[i][i]
        if rest[i] % piv:
            return None
        q = rest[i] // piv
        coords[i] = q
        rest = [x - q * y for x, y in zip(rest, basis[i])]
    if any(rest):
        return None
    return tuple(coords)


def initial_cycle_classes(g: KGraph) -> list[InitialCycleClass]:
    if find_entrance(g) is not None:
        raise NotStablyFinite("the graph has a cycle with an entrance")
    out = []
    for comp in cyclic_components(g):
        others = [c for c in range(1, g.k + 1) if c not in comp.colors]
        if any(g.has_color(v, c) for v in comp.vertices for c in others):
            continue
        out.append(_build_class(g, comp))
    for v in g.vertices:
        if not any(g.has_color(v, c) for c in range(1, g.k + 1)):
            out.append(InitialCycleClass((v,), (), (), v, vertex(g, v), {v: ()}))
    out.sort(key=lambda c: natkey(c.base_point))
    return out


def _build_class(g: KGraph, comp: CyclicComponent) -> InitialCycleClass:
    verts = set(comp.vertices)
    colors = comp.colors
    sigma = {}
    for c in colors:
        step = {}
        for v in comp.vertices:
            ids = g.edges_at(v, c)
            assert len(ids) == 1, f"vertex {v} should carry exactly one color-{c} edge"
            step[v] = g.edges[ids[0]].source
            assert step[v] in verts, f"color-{c} edge at {v} leaves its component"
        sigma[c] = step

    base = comp.vertices[0]
    ell = len(colors)
    pos = {base: (0,) * ell}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for t, c in enumerate(colors):
            w = sigma[c][v]
            if w not in pos:
                pos[w] = tuple(x + (1 if s == t else 0) for s, x in enumerate(pos[v]))
                queue.append(w)
    assert set(pos) == verts, "class action is not transitive"
    relations = []
    for v in comp.vertices:
        for t, c in enumerate(colors):
            bumped = tuple(x + (1 if s == t else 0) for s, x in enumerate(pos[v]))
            relations.append(tuple(a - b for a, b in zip(bumped, pos[sigma[c][v]])))
    basis = hermite_normal_form(relations, ell)
    assert len(basis) == ell, "periodicity lattice is not of full rank"
    index = 1
    for i in range(ell):
        index *= basis[i][i]
    assert index == len(verts), "periodicity lattice index differs from the class size"

    loop = {v: v for v in comp.vertices}
    for c in colors:
        loop = {v: sigma[c][loop[v]] for v in comp.vertices}
    period = _order(loop)
    t = period * max(1, -(-(len(verts) - 1) // period))
    deg = tuple(t if c in colors else 0 for c in range(1, g.k + 1))
    mu = follow(g, base, deg)
    assert mu.source == base
    return InitialCycleClass(comp.vertices, colors, tuple(tuple(r) for r in basis), base, mu, pos)


def rotate(cls: InitialCycleClass, v: str) -> tuple[Path, Path, Path]:
    """Split the representative cycle at v: mu = iota * tau with s(iota) = v = r(tau); mu_v = tau * iota."""
    if v not in cls.vertices:
        raise VertexNotOnClass(f"{v} is not on the class at {cls.base_point}")
    if cls.trivial:
        raise VertexNotOnClass("a trivial class has no cycle to rotate")
    g = cls.cycle.graph
    m = [0] * g.k
    for t, c in enumerate(cls.colors):
        m[c - 1] = cls.positions[v][t]
    iota = segment(cls.cycle, (0,) * g.k, m)
    tau = segment(cls.cycle, m, cls.cycle.degree)
    return iota, tau, compose(tau, iota)


def periodicity_group(cls: InitialCycleClass) -> list[list[int]]:
    return [list(r) for r in cls.lattice]


def lattice_string(cls: InitialCycleClass) -> str:
    if cls.trivial:
        return "0"
    if cls.rank == 1:
        step = cls.lattice[0][0]
        return "Z" if step == 1 else f"{step}Z"
    return " + ".join("Z(" + ",".join(str(x) for x in row) + ")" for row in cls.lattice)
