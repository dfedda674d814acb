"""Monte Carlo simple random walks on coset graphs, plus an exact oracle for F_k.

Trials are grouped in fixed-size blocks; block ``j`` draws from a stream
seeded by ``(seed, j)``, so any trial's randomness depends only on the seed
and its index.  Block results are integer counts combined by summation, so
the estimate does not depend on the order in which blocks are run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import InvalidInput
from .schreier import CoreCosetGraph, Graph, require_radius

BLOCK = 8192
WALK_STREAM = 1


@dataclass(frozen=True)
class WalkEstimate:
    n: int
    trials: int
    p_hat: float
    stderr: float

    def as_dict(self) -> dict:
        return {"n": self.n, "trials": self.trials, "p_hat": self.p_hat, "stderr": self.stderr}


def block_streams(seed: int, trials: int, tag: int = WALK_STREAM,
                  block: int = BLOCK) -> Iterator[tuple[int, int, np.random.Generator]]:
    """Yield (first trial, block size, generator) covering ``trials`` trials."""
    for j, start in enumerate(range(0, trials, block)):
        size = min(block, trials - start)
        ss = np.random.SeedSequence(seed, spawn_key=(tag, j))
        yield start, size, np.random.default_rng(ss)


def _returns_table(table: np.ndarray, cols: np.ndarray) -> int:
    pos = np.zeros(len(cols), dtype=np.int64)
    for j in range(cols.shape[1]):
        live = pos >= 0
        nxt = np.full_like(pos, -1)
        nxt[live] = table[pos[live], cols[live, j]]
        pos = nxt
    return int(np.count_nonzero(pos == 0))


def _returns_core(table: np.ndarray, cols: np.ndarray) -> int:
    """Walk the core; off-core positions keep the column stack of the tail."""
    trials, n = cols.shape
    ar = np.arange(trials)
    v = np.zeros(trials, dtype=np.int64)
    stack = np.full((trials, n + 1), -1, dtype=np.int64)
    depth = np.zeros(trials, dtype=np.int64)
    for j in range(n):
        c = cols[:, j]
        on_core = depth == 0
        target = np.where(on_core, table[v, c], -1)
        move = on_core & (target >= 0)
        v = np.where(move, target, v)
        top = stack[ar, np.maximum(depth - 1, 0)]
        pop = ~on_core & (top == (c ^ 1))
        push = ~move & ~pop
        stack[ar[push], depth[push]] = c[push]
        depth = depth + push - pop
    return int(np.count_nonzero((depth == 0) & (v == 0)))


def mc_return(graph: Graph, n: int, trials: int, seed: int) -> WalkEstimate:
    """Fraction of n-step simple random walks from the base that are at the base at step n."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    if n < 0:
        raise InvalidInput("n must be >= 0")
    require_radius(graph, n)
    hits = 0
    for _, size, rng in block_streams(seed, trials):
        cols = rng.integers(0, graph.d, size=(size, n))
        if isinstance(graph, CoreCosetGraph):
            hits += _returns_core(graph.table, cols)
        else:
            hits += _returns_table(graph.table, cols)
    p = hits / trials
    return WalkEstimate(n, trials, p, math.sqrt(p * (1 - p) / trials))


def free_group_return_counts(k: int, n: int) -> list[int]:
    """Closed walks of length 0..n at the identity of the Cayley graph of F_k.

    Distance from the identity is a birth-death chain: d ways up from 0, and
    from m >= 1 one way down and d-1 ways up.
    """
    if k < 1 or n < 0:
        raise InvalidInput("need k >= 1 and n >= 0")
    d = 2 * k
    ways = [1] + [0] * (n // 2 + 1)
    out = [1]
    for step in range(1, n + 1):
        nxt = [0] * len(ways)
        for m, w in enumerate(ways):
            if not w:
                continue
            if m == 0:
                nxt[1] += d * w
            else:
                nxt[m - 1] += w
                if m + 1 < len(nxt):
                    nxt[m + 1] += (d - 1) * w
        ways = nxt
        out.append(ways[0])
    return out


def free_group_return_exact(k: int, n: int) -> Fraction:
    """Exact n-step return probability p^(n) on the Cayley graph of F_k."""
    return Fraction(free_group_return_counts(k, n)[n], (2 * k) ** n)


def free_group_return_series(k: int, N: int) -> np.ndarray:
    d = 2 * k
    counts = free_group_return_counts(k, N)
    return np.array([float(Fraction(c, d ** i)) for i, c in enumerate(counts)])
