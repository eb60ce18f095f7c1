"""Explicit matrix model of the graph algebra in the stably finite case, with an exact relation checker.

Each initial cycle class contributes one block.  Its basis is the set of
paths in Λ^{<=N} whose source lies on the class; a basis path stands for the
boundary path obtained by running on along the class's unique tail.  A path
acts by prepending itself and truncating back into the basis; the phase is a
monomial recording, in lattice coordinates, how far the tail was shifted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import KGraph
from .cycles import InitialCycleClass, find_entrance, initial_cycle_classes, lattice_coordinates, rotate
from .laurent import LaurentPoly, SparseMatrix
from .paths import (
    Degree,
    Mode,
    NotStablyFinite,
    Path,
    boundary_cap,
    canonical_prefix,
    compose,
    dsub,
    edge,
    enumerate_paths,
    unit,
    vertex,
)

MATRIX_UNIT_CAP = 64


@dataclass
class Block:
    cls: InitialCycleClass
    basis: list[Path]
    index: dict[Path, int]

    @property
    def ell(self) -> int:
        return self.cls.rank

    def height(self, p: Path) -> tuple[int, ...]:
        pos = self.cls.positions[p.source]
        return tuple(p.degree[c - 1] - pos[t] for t, c in enumerate(self.cls.colors))


@dataclass
class Representation:
    graph: KGraph
    blocks: list[Block]
    vertex_images: dict[str, list[SparseMatrix]]
    edge_images: dict[str, list[SparseMatrix]]

    def lattice_bases(self) -> list[list[list[int]]]:
        return [[list(r) for r in b.cls.lattice] for b in self.blocks]


def _owner(g: KGraph) -> dict[str, InitialCycleClass]:
    return {w: cls for cls in initial_cycle_classes(g) for w in cls.vertices}


def absorb(g: KGraph, rho: Path, owner: dict[str, InitialCycleClass] | None = None) -> tuple[Path, Degree]:
    """Truncate rho (run on along its tail) into Λ^{<=N}; returns (alpha, d(rho) - d(alpha))."""
    owner = _owner(g) if owner is None else owner
    cls = owner[rho.source]
    alpha = canonical_prefix(g, cls, rho, boundary_cap(g))
    return alpha, dsub(rho.degree, alpha.degree)


def _image(block: Block, lam: Path, g: KGraph) -> SparseMatrix:
    cls = block.cls
    out = {}
    for j, beta in enumerate(block.basis):
        if beta.range != lam.source:
            continue
        alpha = canonical_prefix(g, cls, compose(lam, beta), boundary_cap(g))
        i = block.index.get(alpha)
        assert i is not None, f"{alpha} is not a basis path"
        defect = dsub(tuple(a + b for a, b in zip(lam.degree, beta.degree)), alpha.degree)
        assert all(defect[c - 1] == 0 for c in range(1, g.k + 1) if c not in cls.colors), \
            "degree defect outside the class colours"
        phase = tuple(lam.degree[c - 1] + h1 - h2
                      for (t, c), h1, h2 in zip(enumerate(cls.colors), block.height(beta), block.height(alpha)))
        coords = lattice_coordinates(cls.lattice, phase) if cls.colors else ()
        assert coords is not None, f"phase {phase} is not in the periodicity lattice"
        out[(i, j)] = LaurentPoly.monomial(coords)
    return SparseMatrix(len(block.basis), block.ell, out)


def path_image(rep: Representation, lam: Path) -> list[SparseMatrix]:
    return [_image(b, lam, rep.graph) for b in rep.blocks]


def build_representation(g: KGraph) -> Representation:
    if find_entrance(g) is not None:
        raise NotStablyFinite("not stably finite: the graph has a cycle with an entrance")
    cap = boundary_cap(g)
    blocks = []
    owner = _owner(g)
    by_class: dict[InitialCycleClass, list[Path]] = {cls: [] for cls in owner.values()}
    for v in g.vertices:
        for p in enumerate_paths(g, v, cap, Mode.AT_MOST_BOUNDARY):
            by_class[owner[p.source]].append(p)
    for cls in initial_cycle_classes(g):
        basis = sorted(by_class[cls], key=Path.sort_key)
        blocks.append(Block(cls, basis, {p: i for i, p in enumerate(basis)}))
    rep = Representation(g, blocks, {}, {})
    for v in g.vertices:
        rep.vertex_images[v] = path_image(rep, vertex(g, v))
    for eid in g.edges:
        rep.edge_images[eid] = path_image(rep, edge(g, eid))
    return rep


# ---------------------------------------------------------------- verification


@dataclass
class CheckResult:
    passed: bool = True
    counterexample: str | None = None

    def fail(self, msg: str) -> None:
        if self.passed:
            self.passed = False
            self.counterexample = msg


@dataclass
class VerificationReport:
    ck1: CheckResult = field(default_factory=CheckResult)
    ck2: CheckResult = field(default_factory=CheckResult)
    ck3: CheckResult = field(default_factory=CheckResult)
    ck4: CheckResult = field(default_factory=CheckResult)
    matrix_units: CheckResult = field(default_factory=CheckResult)
    unit_sum: CheckResult = field(default_factory=CheckResult)
    degrees_checked: list[Degree] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks().values())

    def checks(self) -> dict[str, CheckResult]:
        return {"CK1": self.ck1, "CK2": self.ck2, "CK3": self.ck3, "CK4": self.ck4,
                "matrix units": self.matrix_units, "unit sum": self.unit_sum}


def _mul(x: list[SparseMatrix], y: list[SparseMatrix]) -> list[SparseMatrix]:
    return [a @ b for a, b in zip(x, y)]


def _add(x: list[SparseMatrix], y: list[SparseMatrix]) -> list[SparseMatrix]:
    return [a + b for a, b in zip(x, y)]


def _adj(x: list[SparseMatrix]) -> list[SparseMatrix]:
    return [a.adjoint() for a in x]


def _zero(rep: Representation) -> list[SparseMatrix]:
    return [SparseMatrix.zero(len(b.basis), b.ell) for b in rep.blocks]


def _ident(rep: Representation) -> list[SparseMatrix]:
    return [SparseMatrix.identity(len(b.basis), b.ell) for b in rep.blocks]


def _image_of(rep: Representation, lam: Path) -> list[SparseMatrix]:
    if lam.is_vertex():
        return rep.vertex_images[lam.range]
    if len(lam.edges) == 1:
        return rep.edge_images[lam.edges[0]]
    return path_image(rep, lam)


def verify_ck(rep: Representation, unit_cap: int = MATRIX_UNIT_CAP, pair_degree: int = 2) -> VerificationReport:
    g = rep.graph
    k = g.k
    report = VerificationReport()
    verts = g.sorted_vertices()
    zero = _zero(rep)

    for v in verts:
        pv = rep.vertex_images[v]
        if _adj(pv) != pv:
            report.ck1.fail(f"s_{v} is not self-adjoint")
        for w in verts:
            want = pv if v == w else zero
            if _mul(pv, rep.vertex_images[w]) != want:
                report.ck1.fail(f"s_{v} s_{w} is wrong")

    for e in g.edges.values():
        for f in g.edges.values():
            if e.source != f.range:
                continue
            both = compose(edge(g, e.id), edge(g, f.id))
            if _mul(rep.edge_images[e.id], rep.edge_images[f.id]) != path_image(rep, both):
                report.ck2.fail(f"s_{e.id} s_{f.id} differs from s_({e.id}{f.id})")
    small = (pair_degree,) * k
    short = [p for v in verts for p in enumerate_paths(g, v, small, Mode.AT_MOST_BOUNDARY)]
    short += [p for v in verts for d in _box(small) for p in enumerate_paths(g, v, d, Mode.EXACT)]
    short = sorted(set(short), key=Path.sort_key)
    images = {p: path_image(rep, p) for p in short}
    for p in short:
        for q in short:
            if p.source == q.range and not (p.is_vertex() or q.is_vertex()):
                if _mul(images[p], images[q]) != path_image(rep, compose(p, q)):
                    report.ck2.fail(f"s_lambda s_mu differs from s_(lambda mu) for {p} and {q}")

    for eid in sorted(g.edges):
        img = rep.edge_images[eid]
        if _mul(_adj(img), img) != rep.vertex_images[g.edges[eid].source]:
            report.ck3.fail(f"s_{eid}* s_{eid} differs from s_{g.edges[eid].source} (edge {eid})")

    degrees = [unit(k, i) for i in range(1, k + 1)] + [(1,) * k, boundary_cap(g)]
    report.degrees_checked = list(dict.fromkeys(degrees))
    for n in report.degrees_checked:
        for v in verts:
            total = zero
            for lam in enumerate_paths(g, v, n, Mode.AT_MOST_BOUNDARY):
                img = _image_of(rep, lam)
                total = _add(total, _mul(img, _adj(img)))
            if total != rep.vertex_images[v]:
                report.ck4.fail(f"sum over {v}Λ^<={n} differs from s_{v}")

    _check_matrix_units(rep, report, unit_cap)

    total = zero
    for v in verts:
        total = _add(total, rep.vertex_images[v])
    if total != _ident(rep):
        report.unit_sum.fail("vertex projections do not sum to the identity")
    total = zero
    for b in rep.blocks:
        for lam in b.basis:
            img = _image_of(rep, lam)
            total = _add(total, _mul(img, _adj(img)))
    if total != _ident(rep):
        report.unit_sum.fail("sum of s_lambda s_lambda* over Λ^<=N is not the identity")
    return report


def _box(top: Sequence[int]):
    from itertools import product

    return list(product(*(range(t + 1) for t in top)))


def _check_matrix_units(rep: Representation, report: VerificationReport, cap: int) -> None:
    g = rep.graph
    for bi, block in enumerate(rep.blocks):
        if len(block.basis) > cap:
            report.notes.append(f"matrix units skipped on block {bi} (size {len(block.basis)} > cap {cap})")
            continue
        cls = block.cls
        if cls.trivial:
            tails = {cls.base_point: vertex(g, cls.base_point)}
        else:
            tails = {v: rotate(cls, v)[1] for v in cls.vertices}
        lifted = [_image_of(rep, compose(lam, tails[lam.source]))[bi] for lam in block.basis]
        theta = {}
        for a, x in enumerate(lifted):
            for b, y in enumerate(lifted):
                theta[(a, b)] = x @ y.adjoint()
        size = len(block.basis)
        base = rep.vertex_images[cls.base_point][bi]
        for a in range(size):
            for b in range(size):
                want = base if a == b else SparseMatrix.zero(size, block.ell)
                if lifted[a].adjoint() @ lifted[b] != want:
                    report.matrix_units.fail(f"block {bi}: lifted basis paths {a} and {b} are not orthogonal")
        for a in range(size):
            for b in range(size):
                for c in range(size):
                    if theta[(a, b)] @ theta[(b, c)] != theta[(a, c)]:
                        report.matrix_units.fail(f"block {bi}: theta({a},{b}) theta({b},{c}) != theta({a},{c})")
        if size <= 8:
            for (a, b), x in theta.items():
                for (c, d), y in theta.items():
                    want = theta[(a, d)] if b == c else SparseMatrix.zero(size, block.ell)
                    if x @ y != want:
                        report.matrix_units.fail(f"block {bi}: theta({a},{b}) theta({c},{d}) is wrong")
        total = SparseMatrix.zero(size, block.ell)
        for a in range(size):
            total = total + theta[(a, a)]
        if total != SparseMatrix.identity(size, block.ell):
            report.matrix_units.fail(f"block {bi}: diagonal matrix units do not sum to the identity")


def corrupt(rep: Representation, eid: str, how: str = "exponent") -> Representation:
    """Copy of rep with one entry of one edge image damaged (fault injection).

    ``how="exponent"`` shifts the first exponent of that entry by one;
    ``how="coefficient"`` doubles its coefficient.
    """
    images = dict(rep.edge_images)
    mats = list(images[eid])
    for bi, m in enumerate(mats):
        if not m.entries or (how == "exponent" and not m.ell):
            continue
        key = min(m.entries)
        (exp, c), = m.entries[key].terms.items()
        damaged = dict(m.entries)
        if how == "exponent":
            damaged[key] = LaurentPoly.monomial((exp[0] + 1,) + exp[1:], c)
        else:
            damaged[key] = LaurentPoly.monomial(exp, 2 * c)
        mats[bi] = SparseMatrix(m.n, m.ell, damaged)
        break
    else:
        raise ValueError(f"edge {eid} has no entry to damage")
    images[eid] = mats
    return Representation(rep.graph, rep.blocks, rep.vertex_images, images)


def dump(rep: Representation) -> str:
    lines = []
    for bi, b in enumerate(rep.blocks):
        lines.append(f"block {bi}: class at {b.cls.base_point}, size {len(b.basis)}, rank {b.ell}, "
                     f"lattice basis {[list(r) for r in b.cls.lattice]}")
        for i, p in enumerate(b.basis):
            lines.append(f"  [{i}] {p}")
    for kind, table in (("vertex", rep.vertex_images), ("edge", rep.edge_images)):
        for name in sorted(table):
            for bi, m in enumerate(table[name]):
                if not m.entries:
                    continue
                lines.append(f"{kind} {name}, block {bi}:")
                lines.extend("  " + row for row in m.render())
    return "\n".join(lines) + "\n"
