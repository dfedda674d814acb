"""Folded subgroup graphs of free groups and Schreier rewriting.

A ``SubgroupGraph`` is stored as a transition table of shape (V, 2k) with
``-1`` marking an undefined transition; column ``c`` and ``c ^ 1`` are a
letter and its inverse.  Vertex 0 is the base, and vertices are numbered in
BFS order with columns scanned in shortlex letter order, so equal subgroups
give equal tables.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInput, Refused
from .freegroup import Alphabet, Word, column, concat_reduce, free_reduce, inverse, letter


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        self.parent[b] = a
        return True


@dataclass(frozen=True, eq=False)
class SubgroupGraph:
    k: int
    table: np.ndarray

    @property
    def d(self) -> int:
        return 2 * self.k

    @property
    def num_vertices(self) -> int:
        return len(self.table)

    @property
    def base(self) -> int:
        return 0

    def is_complete(self) -> bool:
        return bool(np.all(self.table >= 0))

    def key(self) -> tuple:
        return (self.k, tuple(map(tuple, self.table.tolist())))

    def __eq__(self, other):
        return isinstance(other, SubgroupGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def edges(self) -> list[tuple[int, int, int]]:
        """Positive-letter edges (tail, letter, head)."""
        out = []
        for v in range(self.num_vertices):
            for c in range(0, self.d, 2):
                u = int(self.table[v, c])
                if u >= 0:
                    out.append((v, letter(c), u))
        return out


def _fold(k: int, n_vertices: int, edges: list[tuple[int, int, int]]) -> tuple[_UnionFind, list]:
    """Merge vertices until every (vertex, column) has at most one target."""
    uf = _UnionFind()
    for _ in range(n_vertices):
        uf.add()
    changed = True
    while changed:
        changed = False
        out: dict[tuple[int, int], int] = {}
        for u, c, v in edges:
            for a, cc, b in ((uf.find(u), c, uf.find(v)), (uf.find(v), c ^ 1, uf.find(u))):
                prev = out.get((a, cc))
                if prev is None:
                    out[(a, cc)] = b
                elif uf.find(prev) != b:
                    uf.union(prev, b)
                    changed = True
                    break
    return uf, edges


def _canonical(k: int, adj: dict[int, dict[int, int]], base: int) -> np.ndarray:
    d = 2 * k
    order = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for c in range(d):
            u = adj.get(v, {}).get(c)
            if u is not None and u not in order:
                order[u] = len(order)
                queue.append(u)
    table = np.full((len(order), d), -1, dtype=np.int64)
    for v, i in order.items():
        for c, u in adj.get(v, {}).items():
            table[i, c] = order[u]
    return table


def build_subgroup_graph(gens: Sequence[Sequence[int]], k: int) -> SubgroupGraph:
    """Folded core graph of H = <gens> in F_k (wedge of loops, then folding)."""
    alpha = Alphabet(k)
    words = [free_reduce(alpha.validate(g)) for g in gens]
    words = [w for w in words if w]
    n_vertices = 1
    edges: list[tuple[int, int, int]] = []  # (tail, column of positive letter, head)
    for w in words:
        path = [0] + [n_vertices + i for i in range(len(w) - 1)] + [0]
        n_vertices += len(w) - 1
        for i, x in enumerate(w):
            if x > 0:
                edges.append((path[i], column(x), path[i + 1]))
            else:
                edges.append((path[i + 1], column(-x), path[i]))
    uf, edges = _fold(k, n_vertices, edges)
    adj: dict[int, dict[int, int]] = {}
    for u, c, v in edges:
        a, b = uf.find(u), uf.find(v)
        adj.setdefault(a, {})[c] = b
        adj.setdefault(b, {})[c ^ 1] = a
    base = uf.find(0)
    _trim(adj, base)
    return SubgroupGraph(k, _canonical(k, adj, base))


def _trim(adj: dict[int, dict[int, int]], base: int) -> None:
    """Remove hanging non-base vertices of degree one, repeatedly."""
    stack = [v for v in adj if v != base and len(adj[v]) == 1]
    while stack:
        v = stack.pop()
        if v not in adj or len(adj[v]) != 1 or v == base:
            continue
        (c, u), = adj[v].items()
        del adj[v]
        if u in adj:
            adj[u].pop(c ^ 1, None)
            if u != base and len(adj[u]) == 1:
                stack.append(u)


def trace_partial(g: SubgroupGraph, w: Sequence[int]) -> int | None:
    """Endpoint of the w-labelled path from the base, or None if it leaves the graph."""
    v = 0
    for x in w:
        v = int(g.table[v, column(x)])
        if v < 0:
            return None
    return v


def member(g: SubgroupGraph, w: Sequence[int]) -> bool:
    return trace_partial(g, free_reduce(w)) == 0


INFINITE = float("inf")


def index(g: SubgroupGraph, k: int | None = None) -> int | float:
    """Index of H in F_k: the vertex count if the graph is complete, else infinity."""
    if k is not None and k != g.k:
        raise InvalidInput(f"graph is over k={g.k}, asked about k={k}")
    return g.num_vertices if g.is_complete() else INFINITE


# -------------------------------------------------------------- rewriting

@dataclass(frozen=True, eq=False)
class SchreierRewriter:
    """Schreier transversal and rewriting tables for a finite-index subgroup.

    ``u[t][c]`` is a word over the Schreier generators (letters ±1..±m) and
    ``s[t][c]`` a transversal index with ``T[t] x = u(t, x) T[s(t, x)]``.
    """

    k: int
    transversal: list[Word]
    generators: list[Word]
    u: list[list[Word]]
    s: np.ndarray
    graph: SubgroupGraph = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def max_u_length(self) -> int:
        return max((len(cell) for row in self.u for cell in row), default=0)

    def expand(self, v: Sequence[int]) -> Word:
        """A word over the Schreier generators written out over the ambient letters."""
        parts = []
        for y in v:
            g = self.generators[abs(y) - 1]
            parts.append(g if y > 0 else inverse(g))
        return concat_reduce(*parts)

    def rewrite(self, w: Sequence[int]) -> tuple[Word, int]:
        """Rewrite w as v * T[t]; w lies in the subgroup iff t == 0."""
        v: list[int] = []
        t = 0
        for x in w:
            c = column(x)
            v.extend(self.u[t][c])
            t = int(self.s[t, c])
        return tuple(v), t


def make_rewriter(g: SubgroupGraph, k: int | None = None) -> SchreierRewriter:
    if k is None:
        k = g.k
    if index(g, k) == INFINITE:
        raise Refused("Schreier rewriting needs a finite-index subgroup")
    d = 2 * k
    V = g.num_vertices
    transversal: list[Word | None] = [None] * V
    transversal[0] = ()
    tree: set[tuple[int, int, int]] = set()
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for c in range(d):
            u = int(g.table[v, c])
            if transversal[u] is None:
                transversal[u] = transversal[v] + (letter(c),)
                tree.add(_edge_id(v, c, u))
                queue.append(u)
    gen_of: dict[tuple[int, int, int], int] = {}
    generators: list[Word] = []
    for v in range(V):
        for c in range(d):
            e = _edge_id(v, c, int(g.table[v, c]))
            if e not in tree and e not in gen_of:
                p, pc, q = e
                generators.append(concat_reduce(transversal[p], (letter(pc),), inverse(transversal[q])))
                gen_of[e] = len(generators)
    u_tab: list[list[Word]] = []
    for v in range(V):
        row = []
        for c in range(d):
            e = _edge_id(v, c, int(g.table[v, c]))
            if e in tree:
                row.append(())
            else:
                row.append((gen_of[e],) if c % 2 == 0 else (-gen_of[e],))
        u_tab.append(row)
    return SchreierRewriter(k, [t for t in transversal], generators, u_tab, g.table.copy(), g)


def _edge_id(v: int, c: int, u: int) -> tuple[int, int, int]:
    """Undirected edge as (tail, positive column, head)."""
    return (v, c, u) if c % 2 == 0 else (u, c ^ 1, v)
