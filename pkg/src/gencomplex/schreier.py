"""Coset graphs Gamma(G, H, A) used as the substrate for counting and walks.

Three shapes are supported:

* ``CosetGraph``   finite, complete, label-deterministic (finite index).
* ``LazyBall``     a radius-R ball of a quotient Cayley graph, discovered
                   through canonical forms of homomorphic images.
* ``CoreCosetGraph`` the coset graph of an infinite-index finitely generated
                   subgroup of F_k: its folded core, with every undefined
                   transition leading into a free hanging tree.

All three use a (V, 2k) integer table with ``-1`` for undefined transitions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import BudgetExceeded, ConfigError, Refused
from .freegroup import column, letter
from .presentation import Homomorphism
from .stallings import INFINITE, SubgroupGraph, index

DEFAULT_BALL_BUDGET = 5_000_000


def _is_bipartite(table: np.ndarray) -> bool | None:
    """2-colour the graph from the base; None when transitions are missing."""
    if np.any(table < 0):
        return None
    colour = np.full(len(table), -1, dtype=np.int64)
    colour[0] = 0
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in table[v]:
            if colour[u] < 0:
                colour[u] = 1 - colour[v]
                queue.append(int(u))
            elif colour[u] == colour[v]:
                return False
    return True


def _check_structure(table: np.ndarray) -> None:
    V, d = table.shape
    for c in range(d):
        ok = table[:, c] >= 0
        src = np.nonzero(ok)[0]
        back = table[table[src, c], c ^ 1]
        if np.any(back != src):
            raise ValueError(f"column {c} is not an involution with column {c ^ 1}")


@dataclass(frozen=True, eq=False)
class CosetGraph:
    k: int
    table: np.ndarray
    bipartite: bool = field(init=False)

    def __post_init__(self):
        if np.any(self.table < 0):
            raise ValueError("coset graph must be complete")
        _check_structure(self.table)
        object.__setattr__(self, "bipartite", bool(_is_bipartite(self.table)))

    @property
    def d(self) -> int:
        return 2 * self.k

    @property
    def num_vertices(self) -> int:
        return len(self.table)

    @property
    def base(self) -> int:
        return 0

    radius = None


@dataclass(frozen=True, eq=False)
class LazyBall:
    k: int
    table: np.ndarray
    dist: np.ndarray
    radius: int
    names: list = field(repr=False)

    @property
    def d(self) -> int:
        return 2 * self.k

    @property
    def num_vertices(self) -> int:
        return len(self.table)

    @property
    def base(self) -> int:
        return 0

    @property
    def complete(self) -> bool:
        return bool(np.all(self.table >= 0))

    @property
    def bipartite(self) -> bool | None:
        return _is_bipartite(self.table)

    def to_coset_graph(self) -> CosetGraph:
        if not self.complete:
            raise Refused(f"ball of radius {self.radius} has not closed up; the quotient may be infinite")
        return CosetGraph(self.k, self.table)


@dataclass(frozen=True, eq=False)
class CoreCosetGraph:
    k: int
    table: np.ndarray
    subgroup: SubgroupGraph = field(repr=False)

    @property
    def d(self) -> int:
        return 2 * self.k

    @property
    def num_vertices(self) -> int:
        return len(self.table)

    @property
    def base(self) -> int:
        return 0

    @property
    def bipartite(self) -> bool:
        """Bipartite iff every core cycle has even length (trees add no cycles)."""
        colour = np.full(len(self.table), -1, dtype=np.int64)
        colour[0] = 0
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for u in self.table[v]:
                if u < 0:
                    continue
                if colour[u] < 0:
                    colour[u] = 1 - colour[v]
                    queue.append(int(u))
                elif colour[u] == colour[v]:
                    return False
        return True

    def missing_slots(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(self.table < 0)
        return list(zip(rows.tolist(), cols.tolist()))

    radius = None


Graph = Union[CosetGraph, LazyBall, CoreCosetGraph]


def coset_graph_from_subgroup(g: SubgroupGraph, k: int | None = None) -> CosetGraph:
    if index(g, k) == INFINITE:
        raise Refused("subgroup has infinite index; use infinite_coset_graph or lazy_ball")
    return CosetGraph(g.k, g.table.copy())


def infinite_coset_graph(g: SubgroupGraph) -> CoreCosetGraph:
    return CoreCosetGraph(g.k, g.table.copy(), g)


def coset_graph(g: SubgroupGraph) -> CosetGraph | CoreCosetGraph:
    """Gamma(F_k, H, A) for a finitely generated H, whichever its index."""
    if g.is_complete():
        return coset_graph_from_subgroup(g)
    return infinite_coset_graph(g)


def lazy_ball(phi: Homomorphism, k: int, R: int, budget: int = DEFAULT_BALL_BUDGET) -> LazyBall:
    """Ball of radius R around the identity in the Cayley graph of phi(F_k).

    For a normal subgroup H = ker(phi) this is the ball of Gamma(F_k, H, A).
    Vertices are named by canonical forms of images; transitions out of the
    sphere of radius R are filled only when they land on a known vertex.
    """
    if phi.source_k != k:
        raise ValueError(f"homomorphism has source rank {phi.source_k}, expected {k}")
    d = 2 * k
    ident = phi.identity()
    names = [ident]
    ids = {ident: 0}
    dist = [0]
    rows = [[-1] * d]
    frontier = [0]
    for r in range(R + 1):
        nxt = []
        for v in frontier:
            for c in range(d):
                if rows[v][c] >= 0:
                    continue
                name = phi.multiply(names[v], letter(c))
                u = ids.get(name)
                if u is None:
                    if r == R:
                        continue
                    if len(names) >= budget:
                        raise BudgetExceeded(
                            f"ball exceeds {budget} vertices before radius {R}",
                            estimate=budget, attained=r)
                    u = len(names)
                    ids[name] = u
                    names.append(name)
                    dist.append(r + 1)
                    rows.append([-1] * d)
                    nxt.append(u)
                rows[v][c] = u
                rows[u][c ^ 1] = v
        frontier = nxt
        if not frontier:
            break
    table = np.array(rows, dtype=np.int64)
    return LazyBall(k, table, np.array(dist, dtype=np.int64), R, names)


def quotient_coset_graph(phi: Homomorphism, k: int, budget: int = DEFAULT_BALL_BUDGET) -> CosetGraph:
    """Complete Cayley graph of a finite quotient, explored until it closes."""
    R = 1
    while True:
        ball = lazy_ball(phi, k, R, budget)
        if ball.complete:
            return ball.to_coset_graph()
        if int(ball.dist.max()) < R:
            raise Refused("exploration stalled without closing")
        R *= 2


def require_radius(graph: Graph, n: int) -> None:
    """Closed walks of length n stay within distance n/2 of the base."""
    if isinstance(graph, LazyBall) and not graph.complete and 2 * graph.radius < n:
        raise Refused(f"ball radius {graph.radius} too small for length {n}; need {(n + 1) // 2}")


def trace(graph: Graph, start, w: Sequence[int]):
    """Endpoint of the unique w-labelled path from ``start``.

    On a ``CoreCosetGraph`` positions inside a hanging tree are returned as
    ``(root, tail)`` with ``tail`` the reduced word read off the core.
    """
    if isinstance(graph, CoreCosetGraph):
        if isinstance(start, tuple):
            v, tail = start[0], list(start[1])
        else:
            v, tail = int(start), []
        for x in w:
            if tail:
                if tail[-1] == -x:
                    tail.pop()
                else:
                    tail.append(x)
            else:
                u = int(graph.table[v, column(x)])
                if u >= 0:
                    v = u
                else:
                    tail.append(x)
        return (v, tuple(tail)) if tail else v
    v = int(start)
    for x in w:
        u = int(graph.table[v, column(x)])
        if u < 0:
            raise Refused(f"path leaves the explored ball of radius {graph.radius}")
        v = u
    return v


# ------------------------------------------------------------------ dump/load

def dump_graph(graph: Graph) -> str:
    if isinstance(graph, CosetGraph):
        kind, extra = "finite", ""
    elif isinstance(graph, LazyBall):
        kind, extra = "ball", f" radius={graph.radius}"
    else:
        kind, extra = "core", ""
    bip = graph.bipartite
    bip_s = "unknown" if bip is None else str(bool(bip)).lower()
    lines = [f"d={graph.d} V={graph.num_vertices} base=0 bipartite={bip_s} kind={kind}{extra}"]
    for row in graph.table:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError("empty graph file")
    header = {}
    for tok in lines[0].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise ConfigError(f"bad header token {tok!r}", 1)
        header[key] = val
    try:
        d, V = int(header["d"]), int(header["V"])
    except (KeyError, ValueError) as exc:
        raise ConfigError("header needs d= and V=", 1) from exc
    if d % 2:
        raise ConfigError("degree must be even", 1)
    rows = []
    for i, ln in enumerate(lines[1:], 2):
        try:
            row = [int(x) for x in ln.split()]
        except ValueError as exc:
            raise ConfigError(f"non-integer entry in {ln!r}", i) from exc
        if len(row) != d:
            raise ConfigError(f"expected {d} targets, got {len(row)}", i)
        rows.append(row)
    if len(rows) != V:
        raise ConfigError(f"header says V={V} but {len(rows)} rows follow")
    table = np.array(rows, dtype=np.int64).reshape(V, d)
    if np.any(table >= V) or np.any(table < -1):
        raise ConfigError("target index out of range")
    try:
        _check_structure(table)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    kind = header.get("kind", "finite" if np.all(table >= 0) else "core")
    k = d // 2
    if kind == "finite":
        return CosetGraph(k, table)
    if kind == "ball":
        radius = int(header.get("radius", 0))
        dist = _bfs_dist(table)
        return LazyBall(k, table, dist, radius, [None] * V)
    return CoreCosetGraph(k, table, SubgroupGraph(k, table))


def _bfs_dist(table: np.ndarray) -> np.ndarray:
    dist = np.full(len(table), -1, dtype=np.int64)
    dist[0] = 0
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in table[v]:
            if u >= 0 and dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(int(u))
    return dist
