"""Skeleton data model, file format, and validation of finite locally convex k-graphs.

Direction convention used throughout the package: an edge ``e`` has a range
``r(e)`` and a source ``s(e)``; a composite ``xy`` exists when ``s(x) == r(y)``,
and ``vΛ`` denotes the paths whose range is ``v``.  Walking a path therefore
goes from its range towards its source.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

ERROR_KINDS = (
    "MissingSquare",
    "DuplicateSquare",
    "NonBijectiveSwap",
    "HexagonFailure",
    "NotLocallyConvex",
    "DanglingReference",
    "BadColor",
)


class FormatError(Exception):
    """The document is not well-formed (syntax or schema)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(Exception):
    def __init__(self, kind: str, message: str, **detail):
        assert kind in ERROR_KINDS, kind
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.detail = detail


class Ambiguous(Exception):
    """A bicoloured 2-path admits several square completions."""

    def __init__(self, path: tuple[str, str], candidates: list[tuple[str, str]]):
        opts = ", ".join(f"{c}{d}" for c, d in candidates)
        super().__init__(f"Ambiguous: {path[0]}{path[1]} can be completed by {opts}")
        self.path = path
        self.candidates = candidates


@lru_cache(maxsize=65536)
def natkey(s: str):
    """Sort key that orders embedded integers numerically (v2 < v10)."""
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.findall(r"\d+|\D+", s))


@dataclass(frozen=True)
class Edge:
    id: str
    color: int
    range: str
    source: str


@dataclass(frozen=True)
class Square:
    first: tuple[str, str]
    second: tuple[str, str]


@dataclass(frozen=True)
class Skeleton:
    k: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    squares: tuple[Square, ...] = ()

    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}


# ---------------------------------------------------------------- file format


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise FormatError(msg)


def parse_skeleton(document: str) -> Skeleton:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None
    _require(isinstance(data, dict), "top level must be an object")
    for key in ("k", "vertices", "edges"):
        _require(key in data, f"missing field {key!r}")
    k = data["k"]
    _require(isinstance(k, int) and not isinstance(k, bool) and k >= 1, "k must be a positive integer")
    verts = data["vertices"]
    _require(isinstance(verts, list) and all(isinstance(v, str) for v in verts), "vertices must be a list of strings")
    _require(len(verts) > 0, "vertex set must be nonempty")
    _require(len(set(verts)) == len(verts), "duplicate vertex id")
    vset = set(verts)

    edges = []
    _require(isinstance(data["edges"], list), "edges must be a list")
    for rec in data["edges"]:
        _require(isinstance(rec, dict), "edge records must be objects")
        for key in ("id", "color", "range", "source"):
            _require(key in rec, f"edge record missing {key!r}")
        eid, color = rec["id"], rec["color"]
        _require(isinstance(eid, str), "edge id must be a string")
        _require(isinstance(color, int) and not isinstance(color, bool), f"edge {eid}: color must be an integer")
        if not 1 <= color <= k:
            raise ValidationError("BadColor", f"edge {eid} has color {color} outside 1..{k}", edge=eid, color=color)
        for end in ("range", "source"):
            if rec[end] not in vset:
                raise ValidationError("DanglingReference", f"edge {eid} names undeclared vertex {rec[end]!r}",
                                      edge=eid, vertex=rec[end])
        edges.append(Edge(eid, color, rec["range"], rec["source"]))
    ids = [e.id for e in edges]
    _require(len(set(ids)) == len(ids), "duplicate edge id")
    eset = set(ids)

    squares = []
    raw = data.get("squares", [])
    _require(isinstance(raw, list), "squares must be a list")
    for rec in raw:
        _require(isinstance(rec, dict) and "first" in rec and "second" in rec, "square records need first and second")
        pair = []
        for key in ("first", "second"):
            val = rec[key]
            _require(isinstance(val, list) and len(val) == 2 and all(isinstance(x, str) for x in val),
                     f"square {key} must be a pair of edge ids")
            for x in val:
                if x not in eset:
                    raise ValidationError("DanglingReference", f"square names undeclared edge {x!r}", edge=x)
            pair.append(tuple(val))
        squares.append(Square(pair[0], pair[1]))
    return Skeleton(k, tuple(verts), tuple(edges), tuple(squares))


def serialize_skeleton(s: Skeleton) -> str:
    doc = {
        "k": s.k,
        "vertices": list(s.vertices),
        "edges": [{"id": e.id, "color": e.color, "range": e.range, "source": e.source} for e in s.edges],
        "squares": [{"first": list(q.first), "second": list(q.second)} for q in s.squares],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def export_dot(s: Skeleton) -> str:
    lines = [
        "digraph kgraph {",
        "  // edges are drawn from source to range: an edge e has r(e) at the arrow head",
    ]
    for v in s.vertices:
        lines.append(f"  {json.dumps(v)};")
    for e in s.edges:
        lines.append(f'  {json.dumps(e.source)} -> {json.dumps(e.range)} '
                     f'[label={json.dumps(e.id)}, color="/set19/{e.color}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- the k-graph


class KGraph:
    """A validated skeleton together with its lookup tables.

    Only ``validate`` builds instances.  ``swap(x, y)`` rewrites a composable
    pair of differently coloured edges into the other colour order.
    """

    def __init__(self, skeleton: Skeleton, swap: dict[tuple[str, str], tuple[str, str]]):
        self.skeleton = skeleton
        self.k = skeleton.k
        self.vertices = skeleton.vertices
        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        self.edges = skeleton.edge_map()
        self._swap = swap
        into: dict[tuple[str, int], list[str]] = {}
        for e in skeleton.edges:
            into.setdefault((e.range, e.color), []).append(e.id)
        self._into = {key: tuple(sorted(ids, key=natkey)) for key, ids in into.items()}
        self._adj = [_adjacency(skeleton, c) for c in range(1, self.k + 1)]

    def __repr__(self) -> str:
        return f"KGraph(k={self.k}, vertices={len(self.vertices)}, edges={len(self.edges)})"

    def edges_at(self, v: str, color: int) -> tuple[str, ...]:
        """Edge ids of the given colour whose range is ``v``."""
        return self._into.get((v, color), ())

    def has_color(self, v: str, color: int) -> bool:
        return (v, color) in self._into

    def color(self, eid: str) -> int:
        return self.edges[eid].color

    def swap(self, x: str, y: str) -> tuple[str, str]:
        return self._swap[(x, y)]

    def adjacency(self, color: int) -> list[list[int]]:
        if not 1 <= color <= self.k:
            raise ValidationError("BadColor", f"color {color} outside 1..{self.k}", color=color)
        return [row[:] for row in self._adj[color - 1]]

    def sorted_vertices(self) -> list[str]:
        return sorted(self.vertices, key=natkey)


def _adjacency(s: Skeleton, color: int) -> list[list[int]]:
    idx = {v: i for i, v in enumerate(s.vertices)}
    n = len(s.vertices)
    a = [[0] * n for _ in range(n)]
    for e in s.edges:
        if e.color == color:
            a[idx[e.range]][idx[e.source]] += 1
    return a


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    n, m = len(a), len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        row = a[i]
        orow = out[i]
        for t, x in enumerate(row):
            if x:
                brow = b[t]
                for j in range(m):
                    if brow[j]:
                        orow[j] += x * brow[j]
    return out


def adjacency(g: KGraph, color: int) -> list[list[int]]:
    return g.adjacency(color)


def _two_paths(edges: dict[str, Edge], by_range: dict[str, list[Edge]], ci: int, cj: int):
    """Composable pairs xy with color(x)=ci, color(y)=cj."""
    out = []
    for x in edges.values():
        if x.color != ci:
            continue
        for y in by_range.get(x.source, ()):
            if y.color == cj:
                out.append((x.id, y.id))
    return out


def validate(s: Skeleton) -> KGraph:
    """Check the skeleton presents a locally convex k-graph and build it.

    Checks run in order: square bookkeeping and the colour-swap bijection,
    the associativity (hexagon) condition on three-coloured triples, local
    convexity, and finally commutation of the adjacency matrices.
    """
    edges = s.edge_map()
    vset = set(s.vertices)
    for e in s.edges:
        if not 1 <= e.color <= s.k:
            raise ValidationError("BadColor", f"edge {e.id} has color {e.color} outside 1..{s.k}", edge=e.id)
        for end in (e.range, e.source):
            if end not in vset:
                raise ValidationError("DanglingReference", f"edge {e.id} names undeclared vertex {end!r}",
                                      edge=e.id, vertex=end)
    by_range: dict[str, list[Edge]] = {}
    for e in s.edges:
        by_range.setdefault(e.range, []).append(e)

    swap: dict[tuple[str, str], tuple[str, str]] = {}
    for q in s.squares:
        for x in q.first + q.second:
            if x not in edges:
                raise ValidationError("DanglingReference", f"square names undeclared edge {x!r}", edge=x)
        a, b = (edges[x] for x in q.first)
        c, d = (edges[x] for x in q.second)
        if not (a.color < b.color and c.color == b.color and d.color == a.color):
            raise ValidationError("BadColor", f"square {a.id}{b.id}={c.id}{d.id} has colors "
                                  f"({a.color},{b.color})/({c.color},{d.color})", square=(q.first, q.second))
        if a.source != b.range or c.source != d.range or a.range != c.range or b.source != d.source:
            raise ValidationError("NonBijectiveSwap", f"square {a.id}{b.id}={c.id}{d.id} does not match "
                                  "ranges and sources", path=q.first)
        if q.first in swap or q.second in swap:
            dup = q.first if q.first in swap else q.second
            raise ValidationError("DuplicateSquare", f"2-path {dup[0]}{dup[1]} lies in two squares", path=dup)
        swap[q.first] = q.second
        swap[q.second] = q.first

    for ci, cj in combinations(range(1, s.k + 1), 2):
        lo = _two_paths(edges, by_range, ci, cj)
        hi = _two_paths(edges, by_range, cj, ci)
        ends = lambda p: (edges[p[0]].range, edges[p[1]].source)
        count: dict[tuple[str, str], int] = {}
        for p in lo:
            count[ends(p)] = count.get(ends(p), 0) + 1
        for p in hi:
            count[ends(p)] = count.get(ends(p), 0) - 1
        pathkey = lambda p: (natkey(p[0]), natkey(p[1]))
        for p in sorted((p for p in lo + hi if count[ends(p)] != 0), key=pathkey)[:1]:
            raise ValidationError("NonBijectiveSwap", f"2-path {p[0]}{p[1]} (colors "
                                  f"{edges[p[0]].color},{edges[p[1]].color}) has no partner of the other "
                                  "colour order with the same range and source", path=p)
        for p in sorted((p for p in lo + hi if p not in swap), key=pathkey)[:1]:
            raise ValidationError("MissingSquare", f"2-path {p[0]}{p[1]} lies in no square", path=p)

    g = KGraph(s, swap)

    if s.k >= 3:
        for x in s.edges:
            for y in by_range.get(x.source, ()):
                if y.color <= x.color:
                    continue
                for z in by_range.get(y.source, ()):
                    if z.color <= y.color:
                        continue
                    one = _route(g, [x.id, y.id, z.id], (1, 0, 1))
                    two = _route(g, [x.id, y.id, z.id], (0, 1, 0))
                    if one != two:
                        raise ValidationError("HexagonFailure", f"triple {x.id}{y.id}{z.id} rewrites to "
                                              f"{''.join(one)} and {''.join(two)}", triple=(x.id, y.id, z.id))

    for v in s.vertices:
        present = [c for c in range(1, s.k + 1) if g.has_color(v, c)]
        for ci in present:
            for cj in present:
                if ci == cj:
                    continue
                for eid in g.edges_at(v, ci):
                    if not g.has_color(edges[eid].source, cj):
                        raise ValidationError("NotLocallyConvex", f"edge {eid} (color {ci}) shares range {v} "
                                              f"with a color-{cj} edge but s({eid}) has no color-{cj} edge",
                                              edge=eid, vertex=v, color=cj)

    mats = [g.adjacency(c) for c in range(1, s.k + 1)]
    for i, j in combinations(range(s.k), 2):
        assert matmul(mats[i], mats[j]) == matmul(mats[j], mats[i]), "adjacency matrices do not commute"
    return g


def _route(g: KGraph, chain: list[str], order: Iterable[int]) -> list[str]:
    chain = list(chain)
    for pos in order:
        chain[pos], chain[pos + 1] = g.swap(chain[pos], chain[pos + 1])
    return chain


def infer_squares(s: Skeleton) -> Skeleton:
    """Add every square whose completion is forced.

    Within each (range, source, colour pair) group, a lone unmatched 2-path in
    each colour order is paired up.  Raises ``Ambiguous`` when an unmatched
    2-path has two or more candidate partners.
    """
    edges = s.edge_map()
    by_range: dict[str, list[Edge]] = {}
    for e in s.edges:
        by_range.setdefault(e.range, []).append(e)
    used = set()
    for q in s.squares:
        used.add(q.first)
        used.add(q.second)
    added = []
    for ci, cj in combinations(range(1, s.k + 1), 2):
        groups: dict[tuple[str, str], tuple[list, list]] = {}
        for p in _two_paths(edges, by_range, ci, cj):
            if p not in used:
                groups.setdefault((edges[p[0]].range, edges[p[1]].source), ([], []))[0].append(p)
        for p in _two_paths(edges, by_range, cj, ci):
            if p not in used:
                groups.setdefault((edges[p[0]].range, edges[p[1]].source), ([], []))[1].append(p)
        for key in sorted(groups, key=lambda t: (natkey(t[0]), natkey(t[1]))):
            lo, hi = groups[key]
            lo.sort(key=lambda p: (natkey(p[0]), natkey(p[1])))
            hi.sort(key=lambda p: (natkey(p[0]), natkey(p[1])))
            if lo and len(hi) >= 2:
                raise Ambiguous(lo[0], hi)
            if hi and len(lo) >= 2:
                raise Ambiguous(hi[0], lo)
            if len(lo) == 1 and len(hi) == 1:
                added.append(Square(lo[0], hi[0]))
    return Skeleton(s.k, s.vertices, s.edges, s.squares + tuple(added))
