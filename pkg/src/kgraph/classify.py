"""Classification pipeline: cofinality, periodicity, structure and stable rank."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Sequence, Union

from .core import KGraph, Skeleton, ValidationError, natkey, validate
from .cycles import EntranceWitness, InitialCycleClass, find_entrance, initial_cycle_classes
from .paths import Degree, NotStablyFinite, Path, _grow, dle, dmax, dmin, dsub, segment


# ---------------------------------------------------------------- result types


@dataclass(frozen=True)
class Exact:
    n: int

    def token(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class Infinite:
    def token(self) -> str:
        return "inf"


@dataclass(frozen=True)
class Bounds:
    lo: int
    hi: int

    def __post_init__(self):
        if not 2 <= self.lo <= self.hi:
            raise ValueError(f"bounds need 2 <= lo <= hi, got [{self.lo},{self.hi}]")

    def token(self) -> str:
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class Unknown:
    note: str

    def token(self) -> str:
        return "unknown"


StableRankResult = Union[Exact, Infinite, Bounds, Unknown]


@dataclass(frozen=True)
class Found:
    v: str
    m: Degree
    n: Degree


@dataclass(frozen=True)
class NoneUpToBound:
    bound: Degree


@dataclass(frozen=True)
class ExactNone:
    pass


PeriodicityFinding = Union[Found, NoneUpToBound, ExactNone]

SIMPLE, NOT_SIMPLE, UNKNOWN_UP_TO_BOUND = "Simple", "NotSimple", "UnknownUpToBound"


@dataclass(frozen=True)
class Summand:
    cls: InitialCycleClass
    matrix_size: int
    torus_dim: int

    def __str__(self) -> str:
        if self.torus_dim == 0:
            inner = "C"
        elif self.torus_dim == 1:
            inner = "C(T)"
        else:
            inner = f"C(T^{self.torus_dim})"
        return inner if self.matrix_size == 1 else f"M_{self.matrix_size}({inner})"


@dataclass(frozen=True)
class StructureDescriptor:
    summands: tuple[Summand, ...]

    def __str__(self) -> str:
        return " ⊕ ".join(str(s) for s in self.summands)


@dataclass
class ClassificationReport:
    stably_finite: bool
    entrance: EntranceWitness | None
    cofinal: bool
    cofinal_witness: tuple[str, ...] | None
    simplicity: str
    structure: StructureDescriptor | None
    stable_rank: StableRankResult
    properly_infinite: bool | None
    periodicity: PeriodicityFinding | None = None
    notes: list[str] = field(default_factory=list)


def ceil_div(a: int, b: int) -> int:
    return (a + b - 1) // b


# ---------------------------------------------------------------- hereditary sets


def _saturation_hit(g: KGraph, v: str, h: set[str]) -> bool:
    for c in range(1, g.k + 1):
        ids = g.edges_at(v, c)
        if ids and all(g.edges[e].source in h for e in ids):
            return True
    return False


def hereditary_saturated_closure(g: KGraph, seed) -> set[str]:
    h = set(seed)
    while True:
        stack = list(h)
        while stack:
            v = stack.pop()
            for c in range(1, g.k + 1):
                for e in g.edges_at(v, c):
                    w = g.edges[e].source
                    if w not in h:
                        h.add(w)
                        stack.append(w)
        grown = {v for v in g.vertices if v not in h and _saturation_hit(g, v, h)}
        if not grown:
            return h
        h |= grown


def is_hereditary(g: KGraph, h: set[str]) -> bool:
    return all(e.source in h for e in g.edges.values() if e.range in h)


def is_saturated(g: KGraph, h: set[str]) -> bool:
    return not any(v not in h and _saturation_hit(g, v, h) for v in g.vertices)


def is_cofinal(g: KGraph) -> tuple[bool, tuple[str, ...] | None]:
    """Cofinal iff the closure of every single vertex is everything.

    When not cofinal the witness is a smallest proper closure, ties broken by
    the sorted vertex list.
    """
    everything = set(g.vertices)
    proper = []
    for v in g.sorted_vertices():
        h = hereditary_saturated_closure(g, {v})
        if h != everything:
            proper.append(tuple(sorted(h, key=natkey)))
    if not proper:
        return True, None
    best = min(proper, key=lambda t: (len(t), [natkey(x) for x in t]))
    return False, best


# ---------------------------------------------------------------- sub k-graphs


def _restricted(g: KGraph, keep: set[str], edge_ok) -> KGraph:
    s = g.skeleton
    verts = tuple(v for v in s.vertices if v in keep)
    edges = tuple(e for e in s.edges if edge_ok(e))
    ids = {e.id for e in edges}
    squares = tuple(q for q in s.squares if all(x in ids for x in q.first + q.second))
    return validate(Skeleton(s.k, verts, edges, squares))


def quotient_graph(g: KGraph, h: set[str]) -> KGraph:
    """The k-graph on the vertices outside h, dropping every edge that touches h."""
    keep = set(g.vertices) - set(h)
    return _restricted(g, keep, lambda e: e.range in keep and e.source in keep)


def hereditary_subgraph(g: KGraph, h: set[str]) -> KGraph:
    """The k-graph of paths with range in the hereditary set h."""
    h = set(h)
    return _restricted(g, h, lambda e: e.range in h)


# ---------------------------------------------------------------- structure


def _column_count(g: KGraph, w: str, cap: Sequence[int]) -> int:
    """Number of paths in Λ^{<=cap} with source w (summed over all ranges)."""
    idx = g.vindex[w]
    n = len(g.vertices)
    col = [0] * n
    col[idx] = 1
    for c in range(1, g.k + 1):
        a = g.adjacency(c)
        step = lambda vec: [sum(a[i][j] * vec[j] for j in range(n) if a[i][j]) for i in range(n)]
        if g.has_color(w, c):
            for _ in range(cap[c - 1]):
                col = step(col)
        else:
            total = col[:]
            cur = col
            for _ in range(cap[c - 1]):
                cur = step(cur)
                total = [x + y for x, y in zip(total, cur)]
            col = total
    return sum(col)


def default_cap(g: KGraph) -> Degree:
    return (len(g.vertices),) * g.k


def structure(g: KGraph) -> StructureDescriptor:
    if find_entrance(g) is not None:
        raise NotStablyFinite("the graph has a cycle with an entrance")
    cap = default_cap(g)
    summands = []
    for cls in initial_cycle_classes(g):
        size = sum(_column_count(g, w, cap) for w in cls.vertices)
        assert size >= len(cls.vertices)
        summands.append(Summand(cls, size, cls.rank))
    return StructureDescriptor(tuple(summands))


def formula_stable_rank(desc: StructureDescriptor) -> int:
    return max(ceil_div(s.torus_dim // 2, s.matrix_size) + 1 for s in desc.summands)


def rules_stable_rank(desc: StructureDescriptor) -> int:
    """Same value assembled from the torus, matrix-algebra and direct-sum rules."""
    out = 0
    for s in desc.summands:
        torus = s.torus_dim // 2 + 1
        out = max(out, ceil_div(torus - 1, s.matrix_size) + 1)
    return out


# ---------------------------------------------------------------- local periodicity


def default_bound(g: KGraph) -> Degree:
    return (2 * len(g.vertices),) * g.k


def _refutes(p: Path, m: Degree, n: Degree, top: Degree) -> bool:
    d = p.degree
    s = p.source
    finite = [d[i] < top[i] or not p.graph.has_color(s, i + 1) for i in range(len(d))]
    a = dmin(m, d)
    b = dmin(n, d)
    for i in range(len(d)):
        if finite[i] and (m[i] - a[i] != n[i] - b[i] or a[i] != b[i]):
            return True
    span = dsub(d, dmax(a, b))
    return segment(p, a, tuple(x + y for x, y in zip(a, span))) != segment(p, b, tuple(x + y for x, y in zip(b, span)))


def _pair_order(bound: Degree):
    boxes = list(cartesian(*(range(b + 1) for b in bound)))
    pairs = [(m, n) for m in boxes for n in boxes if m > n]
    pairs.sort(key=lambda mn: (sum(mn[0]) + sum(mn[1]), mn[0], mn[1]))
    return pairs


def _survives(g: KGraph, v: str, m: Degree, n: Degree, bound: Degree) -> bool:
    depth = max(bound) if bound else 0
    for extra in range(1, depth + 1):
        top = tuple(max(x, y) + min(extra, b) for x, y, b in zip(m, n, bound))
        for p in _grow(g, v, top, exact=False):
            if _is_truncated_boundary(p, top) and _refutes(p, m, n, top):
                return False
    return True


def _is_truncated_boundary(p: Path, top: Degree) -> bool:
    d = p.degree
    s = p.source
    return all(d[i] == top[i] or not p.graph.has_color(s, i + 1) for i in range(len(d)))


def local_periodicity_search(g: KGraph, bound: Sequence[int] | None = None) -> PeriodicityFinding:
    """Look for a local periodicity (m, n) at some vertex.

    Without an entrance every boundary path ends in the unique tail of its
    class, so a nonzero periodicity lattice gives a periodicity and otherwise
    every boundary path has finite degree and none exists.  With an entrance
    the search runs over m != n <= bound and checks each pair on all
    truncated boundary paths up to degree max(m, n) + bound.
    """
    bound = tuple(default_bound(g) if bound is None else bound)
    if find_entrance(g) is None:
        for cls in initial_cycle_classes(g):
            if not cls.trivial:
                m = [0] * g.k
                for t, c in enumerate(cls.colors):
                    m[c - 1] = cls.lattice[0][t]
                return Found(cls.base_point, tuple(m), (0,) * g.k)
        return ExactNone()
    pairs = _pair_order(bound)
    for v in g.sorted_vertices():
        for m, n in pairs:
            if _survives(g, v, m, n, bound):
                return Found(v, m, n)
    return NoneUpToBound(bound)


def simplicity(g: KGraph, bound: Sequence[int] | None = None) -> str:
    cofinal, _ = is_cofinal(g)
    if not cofinal:
        return NOT_SIMPLE
    finding = local_periodicity_search(g, bound)
    if isinstance(finding, Found):
        return NOT_SIMPLE
    if isinstance(finding, ExactNone):
        return SIMPLE
    return UNKNOWN_UP_TO_BOUND


# ---------------------------------------------------------------- stable rank


def _stable_rank_only(g: KGraph, depth: int, notes: list[str]) -> StableRankResult:
    if find_entrance(g) is None:
        return Exact(formula_stable_rank(structure(g)))
    cofinal, h = is_cofinal(g)
    if cofinal:
        return Infinite()
    if depth > len(g.vertices):
        return Unknown("recursion depth exceeded")
    try:
        quotient = quotient_graph(g, set(h))
        ideal = hereditary_subgraph(g, set(h))
    except ValidationError as exc:
        return Unknown(f"restricted graph is not a valid k-graph ({exc})")
    sr_q = _stable_rank_only(quotient, depth + 1, notes)
    sr_i = _stable_rank_only(ideal, depth + 1, notes)
    if isinstance(sr_q, Exact) and isinstance(sr_i, Exact):
        ideal_upper = 1 if sr_i.n == 1 else 2
        notes.append(f"H = {{{', '.join(h)}}}: quotient sr = {sr_q.n}, ideal graph sr = {sr_i.n}; "
                     "upper bound uses the stabilization rule and is heuristic")
        return Bounds(2, max(ideal_upper, sr_q.n + 1))
    return Unknown(f"H = {{{', '.join(h)}}}: quotient sr {sr_q.token()}, ideal graph sr {sr_i.token()}")


def stable_rank(g: KGraph, periodicity_bound: Sequence[int] | None = None) -> ClassificationReport:
    notes: list[str] = []
    entrance = find_entrance(g)
    cofinal, h = is_cofinal(g)
    periodicity = local_periodicity_search(g, periodicity_bound) if cofinal else None
    if not cofinal:
        simple = NOT_SIMPLE
    elif isinstance(periodicity, Found):
        simple = NOT_SIMPLE
    elif isinstance(periodicity, ExactNone):
        simple = SIMPLE
    else:
        simple = UNKNOWN_UP_TO_BOUND

    if entrance is None:
        desc = structure(g)
        sr = formula_stable_rank(desc)
        assert sr == rules_stable_rank(desc)
        return ClassificationReport(True, None, cofinal, h, simple, desc, Exact(sr), False, periodicity, notes)
    if cofinal:
        return ClassificationReport(False, entrance, True, None, simple, None, Infinite(), True, periodicity, notes)
    result = _stable_rank_only(g, 0, notes)
    if isinstance(result, Bounds):
        notes.append("exact value open")
    return ClassificationReport(False, entrance, False, h, simple, None, result, None, periodicity, notes)
