"""Builders for example families: cycle graphs, products, pullbacks, coordinate graphs, flowers."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .core import Edge, KGraph, Skeleton, Square, ValidationError, infer_squares, validate
from .paths import Mode, Path, compose, count_paths, enumerate_paths, segment

DEFAULT_SIZE_CAP = 10 ** 5


class IncompatibleDimensions(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class MonoidMorphism:
    """f: N^l -> N^k given by a k x l matrix; column j is f(e_j)."""

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.matrix
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise IncompatibleDimensions("matrix must be a nonempty rectangle")
        if any(x < 0 for r in rows for x in r):
            raise IncompatibleDimensions("matrix entries must be nonnegative")

    @property
    def k(self) -> int:
        return len(self.matrix)

    @property
    def ell(self) -> int:
        return len(self.matrix[0])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.matrix)

    @property
    def surjective(self) -> bool:
        cols = {self.column(j) for j in range(self.ell)}
        return all(tuple(int(i == c) for i in range(self.k)) in cols for c in range(self.k))


def cycle_graph(n: int) -> KGraph:
    if n < 1:
        raise ValueError("n must be positive")
    verts = tuple(f"v{i}" for i in range(n))
    edges = tuple(Edge(f"f{i}", 1, f"v{i}", f"v{(i + 1) % n}") for i in range(n))
    return validate(Skeleton(1, verts, edges, ()))


def flower(loops: Sequence[int], squares: Sequence[tuple[tuple[str, str], tuple[str, str]]] | None = None) -> KGraph:
    """One vertex ``v`` carrying loops[i] loops of colour i + 1, named ``c<colour>_<t>``.

    Without explicit squares the forced ones are inferred (``Ambiguous`` otherwise).
    """
    if not loops or any(x < 0 for x in loops):
        raise ValueError("loops must be a nonempty list of nonnegative counts")
    edges = tuple(Edge(f"c{c}_{t}", c, "v", "v") for c, cnt in enumerate(loops, 1) for t in range(1, cnt + 1))
    s = Skeleton(len(loops), ("v",), edges, ())
    if squares is None:
        s = infer_squares(s)
    else:
        s = Skeleton(s.k, s.vertices, s.edges, tuple(Square(tuple(a), tuple(b)) for a, b in squares))
    return validate(s)


def _pair(a: str, b: str) -> str:
    return f"({a},{b})"


def product(g1: KGraph, g2: KGraph) -> KGraph:
    s1, s2 = g1.skeleton, g2.skeleton
    k1 = s1.k
    verts = tuple(_pair(a, b) for a in s1.vertices for b in s2.vertices)
    edges = []
    for e in s1.edges:
        for b in s2.vertices:
            edges.append(Edge(_pair(e.id, b), e.color, _pair(e.range, b), _pair(e.source, b)))
    for a in s1.vertices:
        for f in s2.edges:
            edges.append(Edge(_pair(a, f.id), k1 + f.color, _pair(a, f.range), _pair(a, f.source)))
    squares = []
    for q in s1.squares:
        for b in s2.vertices:
            squares.append(Square((_pair(q.first[0], b), _pair(q.first[1], b)),
                                  (_pair(q.second[0], b), _pair(q.second[1], b))))
    for a in s1.vertices:
        for q in s2.squares:
            squares.append(Square((_pair(a, q.first[0]), _pair(a, q.first[1])),
                                  (_pair(a, q.second[0]), _pair(a, q.second[1]))))
    for e in s1.edges:
        for f in s2.edges:
            squares.append(Square((_pair(e.id, f.range), _pair(e.source, f.id)),
                                  (_pair(e.range, f.id), _pair(e.id, f.source))))
    return validate(Skeleton(k1 + s2.k, verts, tuple(edges), tuple(squares)))


def _path_id(p: Path, j: int) -> str:
    body = ".".join(p.edges) if p.edges else p.range
    return f"{body}@{j}"


def pullback(f: MonoidMorphism, g: KGraph, size_cap: int = DEFAULT_SIZE_CAP) -> KGraph:
    if f.k != g.k:
        raise IncompatibleDimensions(f"morphism lands in N^{f.k} but the graph has k={g.k}")
    by_color: dict[int, list[Path]] = {}
    for j in range(1, f.ell + 1):
        deg = f.column(j - 1)
        total = sum(sum(row) for row in count_paths(g, deg))
        if total > size_cap:
            raise TooLarge(f"color {j} needs {total} paths of degree {deg}, above the cap {size_cap}")
        by_color[j] = [p for v in g.vertices for p in enumerate_paths(g, v, deg, Mode.EXACT)]
    ident = {}
    edges = []
    for j, paths in by_color.items():
        for p in paths:
            eid = _path_id(p, j)
            ident[(p, j)] = eid
            edges.append(Edge(eid, j, p.range, p.source))
    squares = []
    for i, j in combinations(range(1, f.ell + 1), 2):
        di = f.column(i - 1)
        dj = f.column(j - 1)
        for p in by_color[i]:
            for q in by_color[j]:
                if p.source != q.range:
                    continue
                whole = compose(p, q)
                first = segment(whole, (0,) * g.k, dj)
                second = segment(whole, dj, whole.degree)
                squares.append(Square((ident[(p, i)], ident[(q, j)]), (ident[(first, j)], ident[(second, i)])))
                assert second.degree == di
    return validate(Skeleton(f.ell, g.vertices, tuple(edges), tuple(squares)))


def coordinate_graph(g: KGraph, i: int) -> KGraph:
    if not 1 <= i <= g.k:
        raise ValidationError("BadColor", f"color {i} outside 1..{g.k}", color=i)
    pulled = pullback(MonoidMorphism(tuple((int(c == i),) for c in range(1, g.k + 1))), g).skeleton
    # every edge of the coordinate graph is a single edge of g, so keep its id
    edges = tuple(Edge(e.id[:-2], e.color, e.range, e.source) for e in pulled.edges)
    return validate(Skeleton(1, pulled.vertices, edges, ()))
