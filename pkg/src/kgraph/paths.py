"""Path arithmetic on a validated k-graph.

Paths are stored in colour-blocked normal form: ``blocks[i]`` holds the edges
of colour ``i + 1`` and the concatenation of the blocks, in colour order, is a
composable chain read from the range towards the source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

from .core import KGraph, matmul, natkey

Degree = tuple[int, ...]


class NotComposable(ValueError):
    pass


class DegreeOutOfRange(ValueError):
    pass


class RangeMismatch(ValueError):
    pass


class NotStablyFinite(ValueError):
    pass


class Mode(Enum):
    EXACT = "exact"
    AT_MOST_BOUNDARY = "boundary"


def dle(m: Sequence[int], n: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(m, n))


def dmax(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(max(a, b) for a, b in zip(m, n))


def dmin(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(min(a, b) for a, b in zip(m, n))


def dadd(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(a + b for a, b in zip(m, n))


def dsub(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(a - b for a, b in zip(m, n))


def unit(k: int, i: int) -> Degree:
    """The degree e_i (colours are 1-based)."""
    return tuple(1 if c == i else 0 for c in range(1, k + 1))


@dataclass(frozen=True)
class Path:
    graph: KGraph = field(compare=False, hash=False, repr=False)
    blocks: tuple[tuple[str, ...], ...]
    range: str

    @property
    def degree(self) -> Degree:
        return tuple(len(b) for b in self.blocks)

    @property
    def edges(self) -> tuple[str, ...]:
        return tuple(e for b in self.blocks for e in b)

    @property
    def source(self) -> str:
        chain = self.edges
        return self.graph.edges[chain[-1]].source if chain else self.range

    def is_vertex(self) -> bool:
        return not any(self.blocks)

    def sort_key(self):
        return (self.degree, tuple(natkey(e) for e in self.edges), natkey(self.range))

    def __str__(self) -> str:
        parts = [self.range]
        for b in self.blocks:
            if not b:
                continue
            if len(parts) > 1:
                parts.append("|")
            for e in b:
                parts.append(f"-{e}->")
                parts.append(self.graph.edges[e].source)
        return " ".join(parts)


def vertex(g: KGraph, v: str) -> Path:
    return Path(g, tuple(() for _ in range(g.k)), v)


def edge(g: KGraph, eid: str) -> Path:
    e = g.edges[eid]
    return Path(g, tuple((eid,) if c == e.color else () for c in range(1, g.k + 1)), e.range)


def reorder(g: KGraph, chain: Sequence[str], colors: Sequence[int]) -> list[str]:
    """Rewrite a composable chain so that its colour sequence becomes ``colors``.

    Works like insertion sort: the first edge of each wanted colour is moved
    to the front of the unsorted part one square at a time.  The result does
    not depend on the order of the swaps because the squares are associative.
    """
    chain = list(chain)
    for t, want in enumerate(colors):
        j = t
        while g.color(chain[j]) != want:
            j += 1
        while j > t:
            chain[j - 1], chain[j] = g.swap(chain[j - 1], chain[j])
            j -= 1
    return chain


def from_chain(g: KGraph, chain: Sequence[str], rng: str | None = None) -> Path:
    """Normal form of an arbitrary composable edge chain."""
    if not chain:
        if rng is None:
            raise ValueError("empty chain needs a range vertex")
        return vertex(g, rng)
    for x, y in zip(chain, chain[1:]):
        if g.edges[x].source != g.edges[y].range:
            raise NotComposable(f"{x} and {y} are not composable")
    cols = sorted(g.color(e) for e in chain)
    ordered = reorder(g, chain, cols)
    blocks = [[] for _ in range(g.k)]
    for e in ordered:
        blocks[g.color(e) - 1].append(e)
    return Path(g, tuple(tuple(b) for b in blocks), g.edges[chain[0]].range)


def compose(p: Path, q: Path) -> Path:
    if p.source != q.range:
        raise NotComposable(f"s(p)={p.source} differs from r(q)={q.range}")
    if q.is_vertex():
        return p
    if p.is_vertex():
        return q
    return from_chain(p.graph, p.edges + q.edges)


def _split(p: Path, m: Degree) -> tuple[Path, Path]:
    """Factor p = head * tail with d(head) = m."""
    g = p.graph
    rest = dsub(p.degree, m)
    target = [c for c in range(1, g.k + 1) for _ in range(m[c - 1])]
    target += [c for c in range(1, g.k + 1) for _ in range(rest[c - 1])]
    chain = reorder(g, p.edges, target)
    cut = sum(m)
    head = from_chain(g, chain[:cut], p.range)
    mid = g.edges[chain[cut - 1]].source if cut else p.range
    return head, from_chain(g, chain[cut:], mid)


def segment(p: Path, m: Sequence[int], n: Sequence[int]) -> Path:
    """The piece p(m, n) of degree n - m."""
    m, n = tuple(m), tuple(n)
    if not (dle(m, n) and dle(n, p.degree)):
        raise DegreeOutOfRange(f"need {m} <= {n} <= {p.degree}")
    _, tail = _split(p, m)
    piece, _ = _split(tail, dsub(n, m))
    return piece


def _grow(g: KGraph, v: str, n: Degree, exact: bool) -> Iterator[Path]:
    """Depth-first over colour-blocked paths of degree <= n (== n when exact)."""
    k = g.k

    def rec(color: int, blocks: list[list[str]], src: str):
        if color > k:
            yield Path(g, tuple(tuple(b) for b in blocks), v)
            return
        length = len(blocks[color - 1])
        if not exact or length == n[color - 1]:
            yield from rec(color + 1, blocks, src)
        if length < n[color - 1]:
            for eid in g.edges_at(src, color):
                blocks[color - 1].append(eid)
                yield from rec(color, blocks, g.edges[eid].source)
                blocks[color - 1].pop()

    yield from rec(1, [[] for _ in range(k)], v)


def is_boundary_for(p: Path, n: Sequence[int]) -> bool:
    """Whether p lies in Λ^{<=n}: d(p) <= n and p cannot grow in any short colour."""
    d = p.degree
    if not dle(d, n):
        return False
    s = p.source
    return all(d[i] == n[i] or not p.graph.has_color(s, i + 1) for i in range(p.graph.k))


def enumerate_paths(g: KGraph, v: str, n: Sequence[int], mode: Mode = Mode.EXACT) -> list[Path]:
    n = tuple(n)
    if mode is Mode.EXACT:
        out = list(_grow(g, v, n, exact=True))
    else:
        out = [p for p in _grow(g, v, n, exact=False) if is_boundary_for(p, n)]
    out.sort(key=Path.sort_key)
    return out


def count_paths(g: KGraph, n: Sequence[int]) -> list[list[int]]:
    size = len(g.vertices)
    out = [[int(i == j) for j in range(size)] for i in range(size)]
    for c in range(1, g.k + 1):
        a = g.adjacency(c)
        for _ in range(n[c - 1]):
            out = matmul(out, a)
    return out


def mce(p: Path, q: Path) -> set[Path]:
    if p.range != q.range:
        raise RangeMismatch(f"r(p)={p.range} differs from r(q)={q.range}")
    top = dmax(p.degree, q.degree)
    out = set()
    for ext in enumerate_paths(p.graph, p.source, dsub(top, p.degree), Mode.EXACT):
        cand = compose(p, ext)
        if segment(cand, (0,) * p.graph.k, q.degree) == q:
            out.add(cand)
    return out


# ---------------------------------------------------------------- boundary paths


INF = None  # marks an infinite degree entry


@dataclass(frozen=True)
class BoundaryPath:
    """A finite prefix followed by the unique infinite tail on an initial cycle class.

    ``prefix`` is always the canonical truncation, so equality of boundary
    paths is equality of (prefix, class vertices).
    """

    prefix: Path
    cls: object = field(compare=False, hash=False, repr=False)
    class_vertices: frozenset = field(default=frozenset())

    @property
    def base_point(self) -> str:
        return self.prefix.source

    @property
    def degree(self) -> tuple[int | None, ...]:
        colors = self.cls.colors
        return tuple(INF if c in colors else x for c, x in zip(range(1, self.prefix.graph.k + 1), self.prefix.degree))

    def path(self, n: Sequence[int]) -> Path:
        """The initial segment x(0, n) for a finite degree n <= d(x)."""
        from .cycles import follow

        g = self.prefix.graph
        d = self.degree
        if any(x is not INF and a > x for a, x in zip(n, d)):
            raise DegreeOutOfRange(f"{tuple(n)} exceeds the boundary degree")
        need = tuple(max(0, a - b) if c in self.cls.colors else 0
                     for c, a, b in zip(range(1, g.k + 1), n, self.prefix.degree))
        longer = compose(self.prefix, follow(g, self.prefix.source, need))
        return segment(longer, (0,) * g.k, tuple(n))


def canonical_prefix(g: KGraph, cls, rho: Path, cap: Sequence[int]) -> Path:
    """The truncation x(0, d(x) ^ cap) of the boundary path x = rho followed by its tail."""
    from .cycles import follow

    if rho.source not in cls.vertices:
        raise ValueError(f"s(rho)={rho.source} is not on the class")
    need = tuple(max(0, cap[c - 1] - rho.degree[c - 1]) if c in cls.colors else 0 for c in range(1, g.k + 1))
    longer = compose(rho, follow(g, rho.source, need))
    top = tuple(min(cap[c - 1], longer.degree[c - 1]) for c in range(1, g.k + 1))
    return segment(longer, (0,) * g.k, top)


def boundary_cap(g: KGraph) -> Degree:
    return (len(g.vertices),) * g.k


def make_boundary(g: KGraph, cls, rho: Path) -> BoundaryPath:
    return BoundaryPath(canonical_prefix(g, cls, rho, boundary_cap(g)), cls, frozenset(cls.vertices))


def shift(x: BoundaryPath, n: Sequence[int]) -> BoundaryPath:
    """sigma^n(x), the boundary path x(n, infinity)."""
    g = x.prefix.graph
    n = tuple(n)
    d = x.degree
    if any(dd is not INF and a > dd for a, dd in zip(n, d)):
        raise DegreeOutOfRange(f"{n} exceeds the boundary degree")
    top = tuple(a if dd is INF else dd for a, dd in zip(n, d))
    top = dmax(top, x.prefix.degree)
    head = x.path(top)
    return make_boundary(g, x.cls, segment(head, n, top))


def boundary_paths(g: KGraph, v: str) -> list[BoundaryPath]:
    """All boundary paths with range v, in the stably finite case."""
    from .cycles import find_entrance, initial_cycle_classes

    if find_entrance(g) is not None:
        raise NotStablyFinite("the graph has a cycle with an entrance")
    owner = {}
    for cls in initial_cycle_classes(g):
        for w in cls.vertices:
            owner[w] = cls
    out = []
    for lam in enumerate_paths(g, v, boundary_cap(g), Mode.AT_MOST_BOUNDARY):
        cls = owner[lam.source]
        out.append(BoundaryPath(lam, cls, frozenset(cls.vertices)))
    return out
