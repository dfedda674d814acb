"""Asymptotic density of word sets and word-pair sets.

rho_n(S) = |S n B_n| / |B_n| with B_n the ball of words of length <= n, either
over all words or over freely reduced words.  Pairs (w1, w2) are measured by
total length |w1| + |w2| <= n, out of Q_n = sum_{i<=n} (i+1)(2k)^i pairs.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Literal, Sequence

import numpy as np

from .cogrowth import Exponential, Subexponential, decay_fit
from .errors import BudgetExceeded, InvalidInput
from .freegroup import (
    DEFAULT_ENUM_BUDGET,
    Alphabet,
    Mode,
    Word,
    count_ball,
    count_sphere,
    enumerate_ball,
    enumerate_sphere,
    letter_table,
    sphere_array,
)
from .randwalk import block_streams

DENSITY_STREAM = 2
PAIR_STREAM = 3
# an MC point enters a log-scale fit only if its relative stderr is this small
RESOLVED_REL_STDERR = 0.1

WordPredicate = Callable[[Word], bool]


@dataclass(frozen=True)
class DensityPoint:
    n: int
    value: float
    method: Literal["exact", "mc"]
    mode: Literal["all", "reduced", "pairs"]
    trials: int = 0
    stderr: float = 0.0
    exact: Fraction | None = None

    @property
    def resolved(self) -> bool:
        """Usable in a log-scale fit: exact, or MC with a tight relative error."""
        if self.method == "exact":
            return True
        return self.value > 0 and self.stderr <= RESOLVED_REL_STDERR * self.value


class BatchPredicate:
    """A word predicate with an optional vectorized form over letter arrays."""

    def __init__(self, func: WordPredicate, batch: Callable[[np.ndarray], np.ndarray] | None = None):
        self.func = func
        self.batch = batch

    def __call__(self, w: Word) -> bool:
        return self.func(w)


def _evaluate(pred, words: np.ndarray) -> np.ndarray:
    batch = getattr(pred, "batch", None)
    if batch is not None:
        return np.asarray(batch(words), dtype=bool)
    return np.array([bool(pred(tuple(int(x) for x in row))) for row in words], dtype=bool)


def density_exact(pred: WordPredicate, k: int, n: int, mode: Mode = "all",
                  budget: int = DEFAULT_ENUM_BUDGET) -> DensityPoint:
    alpha = Alphabet(k)
    total = count_ball(k, n, mode)
    if total > budget:
        raise BudgetExceeded(f"{total} words exceed enumeration budget {budget}; use density_mc",
                             estimate=total)
    hits = sum(1 for w in enumerate_ball(alpha, n, mode, budget) if pred(w))
    frac = Fraction(hits, total)
    return DensityPoint(n, float(frac), "exact", mode, exact=frac)


def _length_weights(k: int, n: int, mode: Mode) -> np.ndarray:
    sizes = [count_sphere(k, m, mode) for m in range(n + 1)]
    total = sum(sizes)
    return np.array([float(Fraction(s, total)) for s in sizes])


def _sample_rows(k: int, m: int, size: int, mode: Mode, rng: np.random.Generator) -> np.ndarray:
    d = 2 * k
    cols = np.empty((size, m), dtype=np.int64)
    if m:
        cols[:, 0] = rng.integers(0, d, size=size)
        for j in range(1, m):
            if mode == "all":
                cols[:, j] = rng.integers(0, d, size=size)
            else:
                r = rng.integers(0, d - 1, size=size)
                cols[:, j] = r + (r >= (cols[:, j - 1] ^ 1))
    return letter_table(k)[cols]


def density_mc(pred: WordPredicate, k: int, n: int, trials: int, seed: int,
               mode: Mode = "all") -> DensityPoint:
    """Unbiased estimate of rho_n: lengths drawn with probability proportional
    to sphere size, then a uniform word of that length."""
    if trials < 100:
        raise InvalidInput("density_mc needs at least 100 trials")
    weights = _length_weights(k, n, mode)
    hits = 0
    for _, size, rng in block_streams(seed, trials, DENSITY_STREAM):
        lengths = rng.choice(n + 1, size=size, p=weights)
        for m in np.unique(lengths):
            cnt = int(np.count_nonzero(lengths == m))
            rows = _sample_rows(k, int(m), cnt, mode, rng)
            hits += int(np.count_nonzero(_evaluate(pred, rows)))
    p = hits / trials
    return DensityPoint(n, p, "mc", mode, trials, math.sqrt(p * (1 - p) / trials))


def sphere_fraction_mc(pred: WordPredicate, k: int, n: int, trials: int, seed: int,
                       mode: Mode = "reduced") -> DensityPoint:
    """Fraction of words of length exactly n in the set (MC)."""
    hits = 0
    for _, size, rng in block_streams(seed, trials, DENSITY_STREAM):
        rows = _sample_rows(k, n, size, mode, rng)
        hits += int(np.count_nonzero(_evaluate(pred, rows)))
    p = hits / trials
    return DensityPoint(n, p, "mc", mode, trials, math.sqrt(p * (1 - p) / trials))


# ---------------------------------------------------------------- pairs

def pair_count(k: int, n: int) -> int:
    """Q_n, the number of pairs of words with total length <= n."""
    d = 2 * k
    return sum((i + 1) * d ** i for i in range(n + 1))


class EqualKey:
    """Pair predicate ``key(w1) == key(w2)``; lets the exact backend group by key.

    ``vectors`` (one row per letter column) marks an additive key, the sum of
    the rows of a word's letters; such keys are counted without enumeration.
    """

    def __init__(self, key: Callable[[Word], Hashable], vectors: np.ndarray | None = None):
        self.key = key
        self.vectors = None if vectors is None else np.asarray(vectors, dtype=np.int64)

    def __call__(self, w1: Word, w2: Word) -> bool:
        return self.key(w1) == self.key(w2)


def equal_image(phi) -> EqualKey:
    """Pairs with the same image under phi; additive when phi maps into Z^m."""
    vectors = phi.exponent_matrix() if phi.abelian and not any(phi.target.moduli) else None
    return EqualKey(phi.apply, vectors)


def _key_counts_enumerated(pred2: EqualKey, k: int, m: int) -> Counter:
    if pred2.vectors is None:
        return Counter(pred2.key(w) for w in enumerate_sphere(Alphabet(k), m))
    words = sphere_array(k, m)
    if m == 0:
        keys = np.zeros((1, pred2.vectors.shape[1]), dtype=np.int64)
    else:
        keys = pred2.vectors[2 * (np.abs(words) - 1) + (words < 0)].sum(axis=1)
    uniq, counts = np.unique(keys, axis=0, return_counts=True)
    return Counter({tuple(int(x) for x in u): int(c) for u, c in zip(uniq, counts)})


def _key_counts_dp(vectors: np.ndarray, n: int) -> list[Counter]:
    """Number of words of each length with each additive key, by dynamic programming."""
    out = [Counter({(0,) * vectors.shape[1]: 1})]
    steps = [tuple(int(x) for x in row) for row in vectors]
    for _ in range(n):
        nxt: Counter = Counter()
        for key, c in out[-1].items():
            for step in steps:
                nxt[tuple(a + b for a, b in zip(key, step))] += c
        out.append(nxt)
    return out


def _matching_pairs(by_len: Sequence[Counter], n: int) -> int:
    hits = 0
    for l1 in range(n + 1):
        for l2 in range(n + 1 - l1):
            small, large = sorted((by_len[l1], by_len[l2]), key=len)
            hits += sum(c * large.get(key, 0) for key, c in small.items())
    return hits


def pair_density_exact(pred2, k: int, n: int, budget: int = DEFAULT_ENUM_BUDGET,
                       grouping: Literal["enumerate", "dp"] = "enumerate") -> DensityPoint:
    """Exact pair density.

    General predicates are evaluated on every pair, enumerated as the i+1
    splits of each word of length i.  ``EqualKey`` predicates are counted by
    grouping the words of each length by key: with ``grouping="enumerate"``
    every word is visited once, with ``"dp"`` (additive keys only) the key
    counts come from a dynamic program instead.
    """
    Q = pair_count(k, n)
    if isinstance(pred2, EqualKey):
        if grouping == "dp":
            if pred2.vectors is None:
                raise InvalidInput("dp grouping needs an additive key")
            by_len = _key_counts_dp(pred2.vectors, n)
        else:
            if count_ball(k, n, "all") > budget:
                raise BudgetExceeded("pair enumeration over budget", estimate=count_ball(k, n, "all"))
            by_len = [_key_counts_enumerated(pred2, k, m) for m in range(n + 1)]
        hits = _matching_pairs(by_len, n)
    else:
        if Q > budget:
            raise BudgetExceeded(f"{Q} pairs exceed enumeration budget {budget}", estimate=Q)
        hits = 0
        for w in enumerate_ball(Alphabet(k), n, "all", budget):
            for j in range(len(w) + 1):
                if pred2(w[:j], w[j:]):
                    hits += 1
    frac = Fraction(hits, Q)
    return DensityPoint(n, float(frac), "exact", "pairs", exact=frac)


def pair_density_mc(pred2, k: int, n: int, trials: int, seed: int) -> DensityPoint:
    d = 2 * k
    weights = np.array([float(Fraction((i + 1) * d ** i, pair_count(k, n))) for i in range(n + 1)])
    additive = isinstance(pred2, EqualKey) and pred2.vectors is not None
    hits = 0
    for _, size, rng in block_streams(seed, trials, PAIR_STREAM):
        lengths = rng.choice(n + 1, size=size, p=weights)
        for m in np.unique(lengths):
            cnt = int(np.count_nonzero(lengths == m))
            rows = _sample_rows(k, int(m), cnt, "all", rng)
            splits = rng.integers(0, int(m) + 1, size=cnt)
            if additive:
                hits += _additive_pair_hits(pred2.vectors, rows, splits)
                continue
            for row, j in zip(rows, splits):
                w = tuple(int(x) for x in row)
                hits += bool(pred2(w[:j], w[j:]))
    p = hits / trials
    return DensityPoint(n, p, "mc", "pairs", trials, math.sqrt(p * (1 - p) / trials))


def _additive_pair_hits(vectors: np.ndarray, rows: np.ndarray, splits: np.ndarray) -> int:
    """key(prefix) == key(suffix) iff twice the prefix key equals the total."""
    size, m = rows.shape
    prefix = np.zeros((size, m + 1, vectors.shape[1]), dtype=np.int64)
    if m:
        steps = vectors[2 * (np.abs(rows) - 1) + (rows < 0)]
        prefix[:, 1:] = np.cumsum(steps, axis=1)
    head = prefix[np.arange(size), splits]
    return int(np.count_nonzero(np.all(2 * head == prefix[:, -1], axis=1)))


def pair_density(pred2, k: int, n: int, mode: Literal["exact", "mc"] = "exact",
                 trials: int = 100_000, seed: int = 0) -> DensityPoint:
    if mode == "exact":
        return pair_density_exact(pred2, k, n)
    return pair_density_mc(pred2, k, n, trials, seed)


def pair_density_from_returns(b_hat: Sequence[float], k: int, n: int) -> Fraction | float:
    """sum (i+1) b_i / sum (i+1) (2k)^i from normalized return counts b_i/(2k)^i.

    Integer-valued inputs (exact counts b_i) give an exact Fraction.
    """
    d = 2 * k
    if all(isinstance(x, int) for x in b_hat[: n + 1]):
        return Fraction(sum((i + 1) * b for i, b in enumerate(b_hat[: n + 1])), pair_count(k, n))
    num = sum((i + 1) * float(b_hat[i]) * d ** i for i in range(n + 1))
    return num / pair_count(k, n)


# ----------------------------------------------------------- genericity

Genericity = Literal["Generic", "StronglyGeneric", "Negligible", "StronglyNegligible", "Inconclusive"]

TAIL_TOLERANCE = 0.05


@dataclass(frozen=True)
class GenericityReport:
    verdict: Genericity
    direction: Literal["to_one", "to_zero"]
    fit: object
    tail_value: float
    step_ratio: float | None = None


def genericity_report(points: Sequence[DensityPoint], direction: str | None = None,
                      fit_from: int | None = None) -> GenericityReport:
    """Generic / negligible classification of a density sequence.

    The distance to the limit (1 - rho for sets heading to density one, rho
    otherwise) goes through ``decay_fit``; an exponential fit gives the
    Strongly* verdicts.  A decaying but not exponential trend counts only if
    the last point is within 0.05 of the limit.  ``step_ratio`` is the
    per-unit ratio of the gap between the last two fitted points; it stays
    near 1 for polynomial decay.
    """
    if len(points) < 8:
        raise InvalidInput("genericity_report needs at least 8 points")
    pts = sorted(points, key=lambda p: p.n)
    if direction is None:
        direction = "to_one" if pts[-1].value >= 0.5 else "to_zero"
    gap = [(1 - p.value) if direction == "to_one" else p.value for p in pts]
    strong = "StronglyGeneric" if direction == "to_one" else "StronglyNegligible"
    plain = "Generic" if direction == "to_one" else "Negligible"
    tail = gap[-1]
    if all(g == 0 for g in gap):
        return GenericityReport(strong, direction, None, tail)
    usable = [(p.n, g) for p, g in zip(pts, gap)
              if g > 0 and (fit_from is None or p.n >= fit_from)
              and (p.method == "exact" or p.stderr <= RESOLVED_REL_STDERR * g)]
    fit = None
    step = None
    if len(usable) >= 2:
        (n0, g0), (n1, g1) = usable[-2], usable[-1]
        step = (g1 / g0) ** (1 / (n1 - n0))
    if len(usable) >= 8:
        ns, gs = zip(*usable)
        fit = decay_fit(gs, indices=ns)
    if isinstance(fit, Exponential):
        return GenericityReport(strong, direction, fit, tail, step)
    if isinstance(fit, Subexponential) and tail <= TAIL_TOLERANCE:
        return GenericityReport(plain, direction, fit, tail, step)
    return GenericityReport("Inconclusive", direction, fit, tail, step)


def points_to_csv(points: Iterable[DensityPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "rho", "method", "stderr", "mode"])
    for p in sorted(points, key=lambda p: p.n):
        w.writerow([p.n, repr(float(p.value)), p.method, repr(float(p.stderr)), p.mode])
    return buf.getvalue()
