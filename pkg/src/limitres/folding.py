"""Stallings folding of subgroup graphs in a free group."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .words import Word


@dataclass
class FoldedGraph:
    """A folded, core-trimmed labelled graph with a base vertex.

    ``edges`` holds triples ``(tail, generator, head)``; the reverse edge
    carries the inverse label implicitly.
    """

    base: int
    vertices: set[int]
    edges: set[tuple[int, int, int]]

    def is_rose(self, rank: int) -> bool:
        return self.vertices == {self.base} and {g for _, g, _ in self.edges} == set(range(rank)) \
            and len(self.edges) == rank

    def rank(self) -> int:
        """Rank of the subgroup: ``E - V + 1`` for a connected graph."""
        return len(self.edges) - len(self.vertices) + 1


def fold(words: Sequence[Word]) -> FoldedGraph:
    """Fold the wedge of the loops read by ``words``."""
    parent: dict[int, int] = {0: 0}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    edges: list[tuple[int, int, int]] = []
    fresh = 1
    for w in words:
        if w.is_identity():
            continue
        path = [0]
        for _ in range(len(w) - 1):
            parent[fresh] = fresh
            path.append(fresh)
            fresh += 1
        path.append(0)
        for k, (g, s) in enumerate(w.letters):
            u, v = path[k], path[k + 1]
            edges.append((u, g, v) if s == 1 else (v, g, u))

    changed = True
    while changed:
        changed = False
        out_edge: dict[tuple[int, int], int] = {}
        in_edge: dict[tuple[int, int], int] = {}
        current = set()
        for u, g, v in edges:
            u, v = find(u), find(v)
            current.add((u, g, v))
        for u, g, v in sorted(current):
            u, v = find(u), find(v)
            for table, key, other in ((out_edge, (u, g), v), (in_edge, (v, g), u)):
                prev = table.get(key)
                if prev is None:
                    table[key] = other
                elif find(prev) != find(other):
                    a, b = find(prev), find(other)
                    # keep the base vertex as a root
                    if b == find(0):
                        a, b = b, a
                    parent[b] = a
                    changed = True
        edges = [(find(u), g, find(v)) for u, g, v in current]

    edge_set = set(edges)
    vertices = {find(0)} | {u for u, _, _ in edge_set} | {v for _, _, v in edge_set}
    base = find(0)

    # trim hanging trees away from the base vertex
    while True:
        degree = {v: 0 for v in vertices}
        for u, _, v in edge_set:
            degree[u] += 1
            degree[v] += 1
        leaves = {v for v, d in degree.items() if d <= 1 and v != base}
        if not leaves:
            break
        edge_set = {e for e in edge_set if e[0] not in leaves and e[2] not in leaves}
        vertices -= leaves
    return FoldedGraph(base, vertices, edge_set)


def generates_free_group(words: Sequence[Word], rank: int) -> bool:
    """True iff ``words`` generate the whole free group of the given rank."""
    for w in words:
        if w.rank != rank:
            raise ValueError(f"word of rank {w.rank} in a rank {rank} generating set")
    return fold(words).is_rose(rank)
