"""Simple connected graphs, spanning trees and cycle structure.

Vertices are 0-based. Edges are stored as ``(r, s)`` with ``r < s`` in
lexicographic order; the position of an edge in ``Graph.edges`` is its edge
index everywhere else in the package (edge-phase maps, sign patterns, ...).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    SelfLoopError,
    VertexRangeError,
)

MAX_VERTICES = 64


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    edge_index: dict = field(repr=False, compare=False, hash=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def beta(self) -> int:
        return len(self.edges) - self.n + 1

    def index(self, r: int, s: int) -> int:
        """Edge index of the unordered pair ``{r, s}`` (KeyError if absent)."""
        return self.edge_index[(r, s) if r < s else (s, r)]

    def has_edge(self, r: int, s: int) -> bool:
        return ((r, s) if r < s else (s, r)) in self.edge_index

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}


def build_graph(n: int, edge_list) -> Graph:
    """Validate and canonicalize a simple connected graph."""
    if int(n) != n or n < 1:
        raise VertexRangeError(f"vertex count must be a positive integer, got {n!r}")
    n = int(n)
    if n > MAX_VERTICES:
        raise VertexRangeError(f"at most {MAX_VERTICES} vertices supported, got {n}")
    seen = set()
    for pair in edge_list:
        if len(pair) != 2:
            raise VertexRangeError(f"edge {pair!r} is not a pair")
        r, s = (int(x) for x in pair)
        if not (0 <= r < n and 0 <= s < n):
            raise VertexRangeError(f"edge {(r, s)} has a vertex outside [0, {n})")
        if r == s:
            raise SelfLoopError(f"self-loop at vertex {r}")
        e = (min(r, s), max(r, s))
        if e in seen:
            raise DuplicateEdgeError(f"duplicate edge {e}")
        seen.add(e)
    edges = tuple(sorted(seen))
    adj = [[] for _ in range(n)]
    for r, s in edges:
        adj[r].append(s)
        adj[s].append(r)
    adjacency = tuple(tuple(sorted(a)) for a in adj)

    reached = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            if w not in reached:
                reached.add(w)
                queue.append(w)
    if len(reached) != n:
        missing = min(set(range(n)) - reached)
        raise DisconnectedGraphError(f"graph is disconnected (vertex {missing} unreachable from 0)")

    return Graph(n, edges, adjacency, {e: i for i, e in enumerate(edges)})


@dataclass(frozen=True)
class CycleStructure:
    """Spanning tree, fundamental cycles and the flux-torus basis.

    ``fundamental_cycles[j]`` starts ``[r_j, s_j, ...]`` so that walking the
    list (and closing back to ``r_j``) traverses the representative edge
    ``(r_j, s_j)`` from low to high vertex.
    """

    tree_edges: tuple[tuple[int, int], ...]
    fundamental_cycles: tuple[tuple[int, ...], ...]
    representative_edges: tuple[tuple[int, int], ...]
    beta: int
    disjoint: bool
    parent: tuple[int, ...] = field(repr=False)
    bfs_order: tuple[int, ...] = field(repr=False)

    def cycle_edges(self, j: int) -> list[tuple[int, int]]:
        cyc = self.fundamental_cycles[j]
        return [
            (min(a, b), max(a, b))
            for a, b in zip(cyc, cyc[1:] + cyc[:1])
        ]


def _bfs_tree(g: Graph):
    parent = [-1] * g.n
    order = [0]
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    tree = set()
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                order.append(w)
                tree.add((min(v, w), max(v, w)))
                queue.append(w)
    return parent, order, tree


def _tree_path(parent, depth, a, b):
    """Vertices of the tree path a -> b, both ends included."""
    up_a, up_b = [a], [b]
    while depth[a] > depth[b]:
        a = parent[a]
        up_a.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        up_b.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        up_a.append(a)
        up_b.append(b)
    return up_a + up_b[-2::-1]


def analyze_cycles(g: Graph) -> CycleStructure:
    parent, order, tree = _bfs_tree(g)
    depth = [0] * g.n
    for v in order[1:]:
        depth[v] = depth[parent[v]] + 1
    reps = tuple(e for e in g.edges if e not in tree)
    cycles = []
    for r, s in reps:
        # s -> ... -> r along the tree, then the closing edge r -> s.
        path = _tree_path(parent, depth, s, r)
        cycles.append(tuple([r] + path[:-1]))
    return CycleStructure(
        tree_edges=tuple(sorted(tree)),
        fundamental_cycles=tuple(cycles),
        representative_edges=reps,
        beta=len(reps),
        disjoint=has_disjoint_cycles(g),
        parent=tuple(parent),
        bfs_order=tuple(order),
    )


def biconnected_blocks(g: Graph) -> list[list[tuple[int, int]]]:
    """Edge sets of the biconnected blocks (iterative Hopcroft-Tarjan)."""
    disc = [-1] * g.n
    low = [0] * g.n
    timer = 0
    blocks = []
    stack = []
    disc[0] = low[0] = timer
    timer += 1
    # frames: (vertex, parent, neighbor iterator)
    frames = [(0, -1, iter(g.adjacency[0]))]
    while frames:
        v, p, it = frames[-1]
        advanced = False
        for w in it:
            if w == p:
                continue
            if disc[w] == -1:
                stack.append((min(v, w), max(v, w)))
                disc[w] = low[w] = timer
                timer += 1
                frames.append((w, v, iter(g.adjacency[w])))
                advanced = True
                break
            if disc[w] < disc[v]:
                stack.append((min(v, w), max(v, w)))
                low[v] = min(low[v], disc[w])
        if advanced:
            continue
        frames.pop()
        if frames:
            u = frames[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= disc[u]:
                key = (min(u, v), max(u, v))
                block = []
                while True:
                    e = stack.pop()
                    block.append(e)
                    if e == key:
                        break
                blocks.append(sorted(block))
    return blocks


def has_disjoint_cycles(g: Graph) -> bool:
    """True iff no two simple cycles share a vertex.

    Every block must be a single edge or a simple cycle, and no vertex may
    lie on two cycle blocks (two triangles glued at a vertex are a cactus
    but their cycles are not disjoint).
    """
    seen = set()
    for block in biconnected_blocks(g):
        if len(block) == 1:
            continue
        verts = {v for e in block for v in e}
        if len(verts) != len(block) or verts & seen:
            return False
        seen |= verts
    return True


def bridges(g: Graph) -> list[tuple[int, int]]:
    return sorted(b[0] for b in biconnected_blocks(g) if len(b) == 1)


def bridge_sides(g: Graph, bridge: tuple[int, int]) -> tuple[frozenset, frozenset]:
    """Vertex sets of the two components left after deleting ``bridge``.

    The first set contains ``bridge[0]``.
    """
    r, s = bridge
    side = {r}
    queue = deque([r])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if (v, w) in ((r, s), (s, r)) or w in side:
                continue
            side.add(w)
            queue.append(w)
    if s in side:
        raise ValueError(f"{bridge} is not a bridge")
    return frozenset(side), frozenset(range(g.n)) - side
