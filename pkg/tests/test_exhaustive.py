"""Desk-scale exhaustive comparison of the decision procedures with brute-force oracles.

The full sweep runs once per session (cached in smallgraphs) and is shared with the acceptance file.
"""

from __future__ import annotations

from itertools import permutations

import pytest

from smallgraphs import exhaustive_report, matrix_pairs, skeleton_edges, square_assignments


def _orbits_by_brute_force(a, b):
    """Square sets on a one-vertex flower, counted up to relabelling loops of the same colour."""
    los = [(f"a{i}", f"b{a + j}") for i in range(a) for j in range(b)]
    his = [(f"b{a + j}", f"a{i}") for j in range(b) for i in range(a)]
    relabel = [dict(zip([f"a{i}" for i in range(a)], pa)) | dict(zip([f"b{a + j}" for j in range(b)], pb))
               for pa in permutations([f"a{i}" for i in range(a)])
               for pb in permutations([f"b{a + j}" for j in range(b)])]
    seen = set()
    for image in permutations(his):
        squares = frozenset(zip(los, image))
        seen.add(min(tuple(sorted(((g[x], g[y]), (g[z], g[w])) for (x, y), (z, w) in squares))
                     for g in relabel))
    return len(seen)


@pytest.mark.parametrize("loops", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 2)])
def test_orbit_representatives_on_flowers(loops):
    a, b = loops
    verts, edges = skeleton_edges(1, (a,), (b,))
    assert len(list(square_assignments(verts, edges))) == _orbits_by_brute_force(a, b)


def test_matrix_pairs_commute_and_are_canonical():
    seen = set()
    for n, a, b in matrix_pairs(3, 4):
        key = (n, a, b)
        assert key not in seen
        seen.add(key)
        assert sum(a) + sum(b) <= 4


@pytest.mark.parametrize("kind", ["entrance", "lattice", "cofinal", "commute"])
def test_no_disagreement(kind):
    stats, bad = exhaustive_report()
    assert stats["graphs"] > 0
    assert bad[kind] == []


def test_sweep_exercises_both_sides():
    stats, _ = exhaustive_report()
    assert 0 < stats["entrance"] < stats["graphs"]
    assert stats["classes"] > 0
