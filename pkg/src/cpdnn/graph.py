"""Support graphs of symmetric matrices and bipartiteness."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .matcore import SymMatrix

LEFT, RIGHT = 0, 1


@dataclass(frozen=True)
class SupportGraph:
    r: int
    edges: frozenset  # of (i, j) with i < j
    adjacency: tuple  # adjacency[i] is a sorted tuple of neighbours

    @classmethod
    def from_edges(cls, r: int, edges) -> "SupportGraph":
        norm = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < r and 0 <= j < r):
                raise ValueError(f"edge ({i}, {j}) out of range for {r} vertices")
            norm.add((min(i, j), max(i, j)))
        nbrs = [[] for _ in range(r)]
        for i, j in norm:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return cls(r, frozenset(norm), tuple(tuple(sorted(n)) for n in nbrs))

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])


@dataclass(frozen=True)
class TwoColoring:
    color: tuple  # color[i] in {LEFT, RIGHT}

    @property
    def left(self) -> list[int]:
        return [i for i, c in enumerate(self.color) if c == LEFT]

    @property
    def right(self) -> list[int]:
        return [i for i, c in enumerate(self.color) if c == RIGHT]

    def is_valid_for(self, G: SupportGraph) -> bool:
        return all(self.color[i] != self.color[j] for i, j in G.edges)


def support_graph(S: SymMatrix, eps_zero: float = 1e-10) -> SupportGraph:
    a = np.asarray(S.entries if isinstance(S, SymMatrix) else S)
    iu, ju = np.nonzero(np.triu(np.abs(a) > eps_zero, k=1))
    return SupportGraph.from_edges(a.shape[0], zip(iu.tolist(), ju.tolist()))


def two_coloring(G: SupportGraph):
    """Breadth-first two-coloring.

    Returns ``(coloring, None)`` when ``G`` is bipartite and ``(None, cycle)``
    otherwise, where ``cycle`` is a tuple of vertices forming an odd cycle.
    The lowest-index vertex of every component is colored LEFT.
    """
    color = [-1] * G.r
    parent = [-1] * G.r
    depth = [0] * G.r
    for root in range(G.r):
        if color[root] != -1:
            continue
        color[root] = LEFT
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in G.adjacency[u]:
                if color[w] == -1:
                    color[w] = 1 - color[u]
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    queue.append(w)
                elif color[w] == color[u]:
                    return None, _odd_cycle(u, w, parent, depth)
    return TwoColoring(tuple(color)), None


def _odd_cycle(u, w, parent, depth):
    # u and w share a BFS layer parity; join their tree paths at the common ancestor
    up, wp = [u], [w]
    a, b = u, w
    while depth[a] > depth[b]:
        a = parent[a]
        up.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        wp.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        up.append(a)
        wp.append(b)
    cycle = up + wp[-2::-1]
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def connected_components(G: SupportGraph) -> list[set[int]]:
    seen = [False] * G.r
    comps = []
    for root in range(G.r):
        if seen[root]:
            continue
        seen[root] = True
        comp, stack = {root}, [root]
        while stack:
            u = stack.pop()
            for w in G.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def is_forest(G: SupportGraph) -> bool:
    # each component of a forest has |E| = |V| - 1, so overall |E| = |V| - #components
    return len(G.edges) == G.r - len(connected_components(G))


def to_dot(G: SupportGraph, coloring: TwoColoring | None = None, name: str = "G") -> str:
    """Render ``G`` as an undirected DOT graph with 1-based vertex labels."""
    lines = [f"graph {name} {{"]
    if coloring is not None:
        for side, members in (("L", coloring.left), ("R", coloring.right)):
            if members:
                nodes = "; ".join(str(i + 1) for i in members)
                lines.append(f"  subgraph cluster_{side} {{ rank=same; label=\"{side}\"; {nodes}; }}")
    else:
        for i in range(G.r):
            lines.append(f"  {i + 1};")
    for i, j in sorted(G.edges):
        lines.append(f"  {i + 1} -- {j + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"
