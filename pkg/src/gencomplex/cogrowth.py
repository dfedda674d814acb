"""Normalized closed-path counts, growth rates and amenability.

Counts are never formed as integers: every step of the dynamic programs is
divided by d (all paths) or d-1 (reduced paths), so b_hat[n] is the n-step
return probability of the simple random walk and a_hat[n] = a_n / (d-1)^n.
Each b-step is a convex combination, so rounding error grows at most
linearly in n.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidInput, Refused
from .schreier import CoreCosetGraph, CosetGraph, Graph, LazyBall, require_radius

DEFAULT_WINDOW = 5
DEFAULT_TOL_AMEN = 1e-3


def _valid_transitions(table: np.ndarray):
    src, col = np.nonzero(table >= 0)
    return src, col, table[src, col]


def count_unreduced(graph: Graph, N: int) -> np.ndarray:
    """b_hat[0..N]: probability the simple random walk is at the base at step n."""
    if N < 0:
        raise InvalidInput("N must be >= 0")
    require_radius(graph, N)
    if isinstance(graph, CoreCosetGraph):
        return _count_unreduced_core(graph, N)
    d = graph.d
    V = graph.num_vertices
    src, _, dst = _valid_transitions(graph.table)
    p = np.zeros(V)
    p[0] = 1.0
    out = np.empty(N + 1)
    out[0] = 1.0
    for n in range(1, N + 1):
        p = np.bincount(dst, weights=p[src], minlength=V) / d
        out[n] = p[0]
    return out


def _count_unreduced_core(graph: CoreCosetGraph, N: int) -> np.ndarray:
    """Core vertices plus one depth chain per hanging tree.

    All vertices at a given depth of a hanging tree are equivalent for the
    walk, so the mass at depth m is tracked as one number.  A vertex at depth
    m >= 1 has one edge towards the core and d-1 edges away from it.  Mass
    deeper than N/2 cannot return by step N and is dropped.
    """
    d = graph.d
    V = graph.num_vertices
    src, _, dst = _valid_transitions(graph.table)
    slots = graph.missing_slots()
    roots = np.array([v for v, _ in slots], dtype=np.int64)
    M = N // 2 + 1
    p = np.zeros(V)
    p[0] = 1.0
    t = np.zeros((len(slots), M + 1))  # column m-1 holds depth m; last column is overflow
    out = np.empty(N + 1)
    out[0] = 1.0
    for n in range(1, N + 1):
        q = np.bincount(dst, weights=p[src], minlength=V) / d
        nt = np.zeros_like(t)
        if len(slots):
            np.add.at(q, roots, t[:, 0] / d)
            nt[:, 0] = p[roots] / d + t[:, 1] / d
            nt[:, 1:M] = t[:, 0:M - 1] * (d - 1) / d + t[:, 2:M + 1] / d
        p, t = q, nt
        out[n] = p[0]
    return out


def count_reduced(graph: Graph, N: int) -> np.ndarray:
    """a_hat[0..N]: non-backtracking closed paths at the base, over (d-1)^n.

    State is (vertex, column of the last letter).  On a CoreCosetGraph a
    reduced path that enters a hanging tree can never come back, so only the
    core transitions matter.
    """
    if N < 0:
        raise InvalidInput("N must be >= 0")
    require_radius(graph, N)
    d = graph.d
    V = graph.num_vertices
    src, col, dst = _valid_transitions(graph.table)
    out = np.empty(N + 1)
    out[0] = 1.0
    if N == 0:
        return out
    m = np.zeros((V, d))
    first = src == 0
    np.add.at(m, (dst[first], col[first]), 1.0 / (d - 1))
    out[1] = m[0].sum()
    flat_dst = dst * d + col
    for n in range(2, N + 1):
        S = m.sum(axis=1)
        w = (S[src] - m[src, col ^ 1]) / (d - 1)
        m = np.bincount(flat_dst, weights=w, minlength=V * d).reshape(V, d)
        out[n] = m[0].sum()
    return out


def cumulative(values: np.ndarray, base: float) -> np.ndarray:
    """f_n / base^n for f_n = sum_{i<=n} c_i, given c_n / base^n."""
    out = np.empty_like(values)
    acc = 0.0
    for i, v in enumerate(values):
        acc = acc / base + v
        out[i] = acc
    return out


# ------------------------------------------------------------------ rates

def nu_from_alpha(alpha: float, d: int) -> float:
    """Spectral radius from cogrowth rate for a d-regular graph."""
    if d < 3:
        raise InvalidInput(f"need d >= 3, got {d}")
    if not 0 <= alpha <= d - 1 + 1e-12:
        raise InvalidInput(f"alpha={alpha} outside [0, {d - 1}]")
    s = math.sqrt(d - 1)
    if alpha > s:
        return (s / d) * (alpha / s + s / alpha)
    return 2 * s / d


def _usable(values: np.ndarray, bipartite: bool | None) -> np.ndarray:
    n = np.arange(len(values))
    keep = n >= 1
    if bipartite:
        keep &= n % 2 == 0
    return n[keep]


def tail_limsup(values: np.ndarray, window: int = DEFAULT_WINDOW, bipartite: bool | None = False) -> float:
    """Max over the last ``window`` usable indices (even ones on bipartite graphs)."""
    idx = _usable(values, bipartite)[-window:]
    return float(np.max(values[idx])) if len(idx) else 0.0


def _root_limsup(values: np.ndarray, window: int, bipartite: bool | None) -> float:
    idx = _usable(values, bipartite)[-window:]
    best = 0.0
    for n in idx:
        if values[n] > 0:
            best = max(best, float(values[n]) ** (1.0 / n))
    return best


def estimate_rates(series: "CogrowthSeries", window: int = DEFAULT_WINDOW) -> tuple[float, float]:
    """(alpha_hat, beta_hat) as trailing-window maxima of the n-th roots."""
    N = len(series.a_hat) - 1
    if N < 2 * window:
        raise InvalidInput(f"need N >= {2 * window} for window {window}, got N={N}")
    d = series.d
    alpha = (d - 1) * _root_limsup(series.a_hat, window, series.bipartite)
    beta = d * _root_limsup(series.b_hat, window, series.bipartite)
    return alpha, beta


# ------------------------------------------------------------- decay fits

@dataclass(frozen=True)
class Exponential:
    sigma: float
    r2: float
    tail_ratio: float


@dataclass(frozen=True)
class Subexponential:
    slope: float
    r2: float
    tail_ratio: float


@dataclass(frozen=True)
class NoDecay:
    slope: float


DecayFit = Exponential | Subexponential | NoDecay

MIN_FIT_POINTS = 8
R2_EXPONENTIAL = 0.99
# Decay over the second half of the range, relative to the first half.  Pure
# exponentials give 1, power laws about 0.5 or less.
TAIL_RATIO_EXPONENTIAL = 0.6
MIN_TOTAL_DECAY = 0.05


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 1.0
    return float(slope), float(intercept), r2


def decay_fit(c: Sequence[float], range_: tuple[int, int] | None = None,
              indices: Sequence[int] | None = None) -> DecayFit:
    """Classify the decay of a nonnegative sequence toward zero.

    Fits log c_n against n on the nonzero entries.  Exponential needs a
    negative slope, R^2 >= 0.99 and a successive-ratio test: the log-decay
    over the second half of the range must be at least 0.6 of that over the
    first half, i.e. c_{n+D}/c_n stays bounded away from 1.  A sequence
    that decays but fails either test is Subexponential.
    """
    c = np.asarray(c, dtype=float)
    n = np.asarray(indices, dtype=float) if indices is not None else np.arange(len(c), dtype=float)
    if range_ is not None:
        lo, hi = range_
        keep = (n >= lo) & (n <= hi)
        n, c = n[keep], c[keep]
    if np.any(c < 0):
        raise InvalidInput("decay_fit needs nonnegative values")
    nz = c > 0
    n, c = n[nz], c[nz]
    if len(c) < MIN_FIT_POINTS:
        raise InvalidInput(f"decay_fit needs at least {MIN_FIT_POINTS} nonzero points, got {len(c)}")
    y = np.log(c)
    slope, _, r2 = _linfit(n, y)
    span = n[-1] - n[0]
    if -slope * span < MIN_TOTAL_DECAY:
        return NoDecay(slope)
    half = len(n) // 2
    s1, _, _ = _linfit(n[: half + 1], y[: half + 1])
    s2, _, _ = _linfit(n[half:], y[half:])
    ratio = s2 / s1 if s1 < 0 else 0.0
    if slope < 0 and r2 >= R2_EXPONENTIAL and ratio >= TAIL_RATIO_EXPONENTIAL:
        return Exponential(math.exp(slope), r2, ratio)
    return Subexponential(slope, r2, ratio)


@dataclass(frozen=True)
class CumulativeVerdict:
    passed: bool
    hypothesis_holds: bool
    tail_max: float
    tail_max_terms: float


def cumulative_check(c: Sequence[float], base: float, tail: int = 10, tol: float = 1e-2,
                     normalized: bool = False) -> CumulativeVerdict:
    """Check numerically that c_n/base^n -> 0 carries over to f_n/base^n,
    where f_n = c_0 + ... + c_n.

    ``c`` holds raw terms, or c_n/base^n when ``normalized``.  The hypothesis
    counts as holding when the last ``tail`` normalized terms are below
    ``tol``; the check passes when the cumulative ratios are too.
    """
    if base <= 1:
        raise InvalidInput("base must be > 1")
    c = np.asarray(c, dtype=float)
    if normalized:
        ratio = c
    else:
        n = np.arange(len(c))
        with np.errstate(divide="ignore"):
            ratio = np.where(c > 0, np.exp(np.log(np.where(c > 0, c, 1.0)) - n * math.log(base)), 0.0)
    cum = cumulative(ratio, base)
    t_terms = float(np.max(ratio[-tail:]))
    t_cum = float(np.max(cum[-tail:]))
    hyp = t_terms < tol
    return CumulativeVerdict(hyp and t_cum < tol, hyp, t_cum, t_terms)


# ---------------------------------------------------------- classification

Classification = Literal["Amenable", "Nonamenable", "Undetermined"]


def classify(series: "CogrowthSeries", tol_amen: float = DEFAULT_TOL_AMEN,
             fit: DecayFit | None = None, fit_range: tuple[int, int] | None = None) -> Classification:
    """Amenability from the return probabilities.

    Nonamenable needs a certified exponential decay with sigma <= 1 - tol.
    Amenable needs no exponential decay together with either no decay at all
    (the return probability stays bounded away from zero) or beta_hat within
    tol of d.
    """
    if fit is None:
        try:
            fit = decay_fit(series.b_hat, fit_range or (1, len(series.b_hat) - 1))
        except InvalidInput:
            fit = None
    if isinstance(fit, Exponential):
        return "Nonamenable" if fit.sigma <= 1 - tol_amen else "Undetermined"
    if fit is None and not np.any(series.b_hat[1:] > 0):
        return "Undetermined"
    if isinstance(fit, NoDecay):
        return "Amenable"
    if series.beta_hat >= series.d * (1 - tol_amen):
        return "Amenable"
    return "Undetermined"


# --------------------------------------------------------------- series

@dataclass
class CogrowthSeries:
    d: int
    a_hat: np.ndarray
    b_hat: np.ndarray
    r_hat: np.ndarray
    z_hat: np.ndarray
    bipartite: bool | None
    alpha_hat: float = 0.0
    beta_hat: float = 0.0
    nu_hat: float = 0.0
    nu_from_alpha: float = 0.0
    classification: Classification = "Undetermined"
    fit: DecayFit | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return len(self.a_hat) - 1

    def check_invariants(self) -> None:
        assert self.a_hat[0] == 1.0 and self.b_hat[0] == 1.0
        eps = 1e-12
        assert np.all(self.b_hat >= -eps) and np.all(self.b_hat <= 1 + eps), "b_hat outside [0, 1]"
        assert np.all(self.a_hat >= -eps) and np.all(self.a_hat <= self.d / (self.d - 1) + eps), \
            "a_hat outside [0, d/(d-1)]"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_hat", "b_hat", "r_hat", "z_hat"])
        for n in range(self.N + 1):
            w.writerow([n, repr(float(self.a_hat[n])), repr(float(self.b_hat[n])),
                        repr(float(self.r_hat[n])), repr(float(self.z_hat[n]))])
        return buf.getvalue()


def read_series_csv(text: str) -> dict[str, np.ndarray]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return {key: np.array([float(r[key]) for r in rows]) for key in ("n", "a_hat", "b_hat", "r_hat", "z_hat")}


def cogrowth_series(graph: Graph, N: int, window: int = DEFAULT_WINDOW,
                    tol_amen: float = DEFAULT_TOL_AMEN,
                    fit_range: tuple[int, int] | None = None) -> CogrowthSeries:
    d = graph.d
    a = count_reduced(graph, N)
    b = count_unreduced(graph, N)
    bip = graph.bipartite
    s = CogrowthSeries(d, a, b, cumulative(a, d - 1), cumulative(b, d), bip)
    s.check_invariants()
    if N >= 2 * window:
        s.alpha_hat, s.beta_hat = estimate_rates(s, window)
        s.alpha_hat = min(s.alpha_hat, d - 1)
        s.nu_hat = s.beta_hat / d
        if d >= 3:
            s.nu_from_alpha = nu_from_alpha(s.alpha_hat, d)
    lo = min(10, N // 4) if fit_range is None else fit_range[0]
    rng = fit_range or (max(lo, 1), N)
    try:
        s.fit = decay_fit(b, rng)
    except InvalidInput:
        s.fit = None
    s.classification = classify(s, tol_amen, s.fit)
    return s


# --------------------------------------------------- finite index constants

@dataclass(frozen=True)
class FiniteIndexConstants:
    index: int
    bipartite: bool
    a_limsup: float
    b_limsup: float
    nominal: float
    a_ratio: float
    b_ratio: float

    @property
    def a_matches_nominal(self) -> bool:
        return abs(self.a_limsup - self.nominal) <= 1e-9

    @property
    def b_matches_nominal(self) -> bool:
        return abs(self.b_limsup - self.nominal) <= 1e-6


def finite_index_constants(graph: CosetGraph, N: int = 200, window: int = DEFAULT_WINDOW) -> FiniteIndexConstants:
    """Measured limsups of a_hat and b_hat next to the constants 1/p, 2/p.

    On a finite d-regular graph a_hat tends to (d/(d-1))/p (twice that on the
    even subsequence of a bipartite graph), so the measured a-side constant
    differs from the b-side one by the factor d/(d-1).
    """
    if not isinstance(graph, CosetGraph):
        raise Refused("finite-index constants need a finite coset graph")
    p = graph.num_vertices
    bip = graph.bipartite
    a = count_reduced(graph, N)
    b = count_unreduced(graph, N)
    a_ls = tail_limsup(a, window, bip)
    b_ls = tail_limsup(b, window, bip)
    nominal = (2.0 if bip else 1.0) / p
    return FiniteIndexConstants(p, bip, a_ls, b_ls, nominal, a_ls / nominal, b_ls / nominal)
