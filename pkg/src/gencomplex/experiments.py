"""Experiment orchestration: one function per experiment kind.

Each runner takes an ``ExperimentConfig`` and returns a report with a fixed
CSV schema (rows sorted by n) plus a JSON-able summary.  Every runner is a
pure function of the configuration, including its seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cogrowth import (
    Exponential,
    NoDecay,
    Subexponential,
    cogrowth_series,
    count_reduced,
    count_unreduced,
    finite_index_constants,
)
from .config import ExperimentConfig, parse_hom
from .density import (
    DensityPoint,
    equal_image,
    density_exact,
    density_mc,
    genericity_report,
    pair_density,
    pair_density_exact,
)
from .errors import BudgetExceeded, ConfigError
from .freegroup import Alphabet, count_ball, enumerate_sphere, free_reduce, sample_reduced_words, sample_words
from .genericdecide import Answer, _run
from .presentation import Homomorphism
from .randwalk import block_streams, mc_return
from .setups import setup_from_config
from .schreier import CosetGraph, Graph, coset_graph, lazy_ball
from .stallings import build_subgroup_graph, member

QUOTIENT_STREAM = 1 << 20
SWEEP_STREAM = 2 << 20


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


@dataclass
class Report:
    kind: str
    id: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in sorted(self.rows, key=lambda r: r[0]):
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "id": self.id, **self.summary}, indent=2, sort_keys=True) + "\n"


def _fit_dict(fit) -> dict | None:
    if isinstance(fit, Exponential):
        return {"type": "Exponential", "sigma": fit.sigma, "r2": fit.r2, "tail_ratio": fit.tail_ratio}
    if isinstance(fit, Subexponential):
        return {"type": "Subexponential", "slope": fit.slope, "r2": fit.r2, "tail_ratio": fit.tail_ratio}
    if isinstance(fit, NoDecay):
        return {"type": "NoDecay", "slope": fit.slope}
    return None


def check_coherence(exact: float, mc: float, stderr: float, trials: int, what: str) -> None:
    """Exact and MC values must agree within four standard errors.

    The MC stderr is floored by the binomial stderr at the exact value, so a
    run that happens to see no hits is not held to a zero-width band.
    """
    floor = math.sqrt(max(exact * (1 - exact), 0.0) / trials)
    band = 4 * max(stderr, floor)
    if abs(exact - mc) > band + 1e-15:
        raise AssertionError(f"{what}: exact {exact!r} vs MC {mc!r} exceeds 4*stderr={band!r}")


# --------------------------------------------------------------- quotient

def _exact_failures(phi: Homomorphism, k: int, n_max: int, mode: str, budget: int) -> np.ndarray:
    """Fraction of length-l words with trivial image, l = 0..n_max."""
    ball = lazy_ball(phi, k, (n_max + 1) // 2, budget)
    d = 2 * k
    if mode == "all":
        return count_unreduced(ball, n_max)
    a = count_reduced(ball, n_max)
    out = a * (d - 1) / d
    out[0] = 1.0
    return out


def mc_failure(phi: Homomorphism, k: int, length: int, trials: int, seed: int,
               mode: str = "reduced") -> tuple[float, float]:
    hits = 0
    sampler = sample_reduced_words if mode == "reduced" else sample_words
    for _, size, rng in block_streams(seed, trials, QUOTIENT_STREAM + length):
        words = sampler(k, length, size, rng)
        hits += int(np.count_nonzero(phi.trivial_mask(words)))
    p = hits / trials
    return p, math.sqrt(p * (1 - p) / trials)


def run_quotient_experiment(cfg: ExperimentConfig) -> Report:
    """Fraction of words whose image under phi is nontrivial, by length.

    Exact values come from counting closed paths in the Cayley graph of the
    image; MC values from uniform samples.  Both are reported where both
    exist and are checked against each other.
    """
    phi = parse_hom(cfg.hom, cfg.k, cfg.relators)
    exact_lens = [l for l in cfg.lengths if l <= cfg.exact_max]
    exact = None
    note = ""
    if exact_lens:
        try:
            exact = _exact_failures(phi, cfg.k, max(exact_lens), cfg.mode, cfg.budget)
        except BudgetExceeded as exc:
            note = f"exact backend skipped: {exc}"
    report = Report("quotient", cfg.id, ["n", "ratio", "failure", "method", "stderr",
                                         "exact_failure", "mc_failure", "mc_stderr", "mode"])
    points = []
    for l in cfg.lengths:
        p_mc, se = mc_failure(phi, cfg.k, l, cfg.trials, cfg.seed, cfg.mode)
        ex = float(exact[l]) if exact is not None and l <= cfg.exact_max else None
        if ex is not None:
            check_coherence(ex, p_mc, se, cfg.trials, f"length {l}")
            points.append(DensityPoint(l, 1 - ex, "exact", cfg.mode))
            report.rows.append([l, 1 - ex, ex, "exact", 0.0, ex, p_mc, se, cfg.mode])
        else:
            points.append(DensityPoint(l, 1 - p_mc, "mc", cfg.mode, cfg.trials, se))
            report.rows.append([l, 1 - p_mc, p_mc, "mc", se, None, p_mc, se, cfg.mode])
    summary = {"lengths": cfg.lengths, "trials": cfg.trials, "seed": cfg.seed, "mode": cfg.mode}
    if note:
        summary["note"] = note
    if len(points) >= 8:
        gr = genericity_report(points, fit_from=cfg.fit_from)
        summary.update(verdict=gr.verdict, direction=gr.direction, fit=_fit_dict(gr.fit),
                       tail_value=gr.tail_value, step_ratio=gr.step_ratio)
    else:
        summary["verdict"] = None
    if cfg.expect:
        summary["expect"] = cfg.expect
        summary["passed"] = summary["verdict"] == cfg.expect
    report.summary = summary
    return report


# --------------------------------------------------------------- cogrowth

def instance_graph(cfg: ExperimentConfig, radius: int) -> Graph:
    if cfg.subgroup is not None:
        if cfg.relators:
            raise ConfigError("subgroup coset graphs are built in the free group; drop relators")
        return coset_graph(build_subgroup_graph(cfg.subgroup, cfg.k))
    phi = parse_hom(cfg.hom, cfg.k, cfg.relators)
    ball = lazy_ball(phi, cfg.k, radius, cfg.budget)
    return ball.to_coset_graph() if ball.complete else ball


def run_cogrowth_experiment(cfg: ExperimentConfig) -> Report:
    N = cfg.n_max
    graph = instance_graph(cfg, (N + 1) // 2)
    fit_range = None if cfg.fit_from is None else (cfg.fit_from, N)
    s = cogrowth_series(graph, N, cfg.window, fit_range=fit_range)
    report = Report("cogrowth", cfg.id, ["n", "a_hat", "b_hat", "r_hat", "z_hat"])
    for n in range(N + 1):
        report.rows.append([n, float(s.a_hat[n]), float(s.b_hat[n]), float(s.r_hat[n]), float(s.z_hat[n])])
    bip = s.bipartite
    summary = {
        "N": N, "d": s.d, "vertices": graph.num_vertices,
        "graph": type(graph).__name__,
        "bipartite": None if bip is None else bool(bip),
        "alpha_hat": s.alpha_hat, "beta_hat": s.beta_hat,
        "nu_hat": s.nu_hat, "nu_from_alpha": s.nu_from_alpha,
        "classification": s.classification, "fit": _fit_dict(s.fit),
    }
    if isinstance(graph, CosetGraph) and N >= 2 * cfg.window:
        fc = finite_index_constants(graph, N, cfg.window)
        summary["finite_index"] = {
            "index": fc.index, "a_limsup": fc.a_limsup, "b_limsup": fc.b_limsup,
            "nominal_constant": fc.nominal, "a_ratio": fc.a_ratio, "b_ratio": fc.b_ratio,
            "a_matches_nominal": fc.a_matches_nominal, "b_matches_nominal": fc.b_matches_nominal,
            "normalization_note": (
                "limsup of a_hat is d/(d-1) times the nominal constant: reduced closed "
                "paths are counted over (d-1)^n while the first step has d choices"
                if not fc.a_matches_nominal else ""),
        }
    if cfg.expect:
        summary["expect"] = cfg.expect
        summary["passed"] = s.classification == cfg.expect
    report.summary = summary
    return report


# ---------------------------------------------------------------- density

def make_predicate(cfg: ExperimentConfig) -> tuple[Callable, bool]:
    """Returns (predicate, is_pair_predicate)."""
    toks = cfg.predicate.split()
    name, args = toks[0], toks[1:]
    if name in ("kernel", "not-kernel", "equal-image"):
        if cfg.hom is None:
            raise ConfigError(f"predicate {name!r} needs [instance] hom")
        phi = parse_hom(cfg.hom, cfg.k, cfg.relators)
        if name == "equal-image":
            return equal_image(phi), True
        want = name == "kernel"
        return (lambda w: phi.is_identity(phi.apply(w)) == want), False
    if name == "subgroup":
        if cfg.subgroup is None:
            raise ConfigError("predicate 'subgroup' needs [instance] subgroup")
        g = build_subgroup_graph(cfg.subgroup, cfg.k)
        return (lambda w: member(g, w)), False
    if name == "zero-exponent":
        i = int(args[0]) if args else 1
        return (lambda w: sum(1 if x == i else -1 if x == -i else 0 for x in w) == 0), False
    if name == "nontrivial":
        return (lambda w: bool(free_reduce(w))), False
    raise ConfigError(f"unknown predicate {name!r}")


def run_density_experiment(cfg: ExperimentConfig) -> Report:
    pred, pairs = make_predicate(cfg)
    mode = "pairs" if pairs else cfg.mode
    report = Report("density", cfg.id, ["n", "rho", "method", "stderr", "mode"])
    points = []
    for n in cfg.lengths:
        if pairs:
            if n <= cfg.exact_max and count_ball(cfg.k, n, "all") <= cfg.budget:
                pt = pair_density_exact(pred, cfg.k, n, cfg.budget)
            elif pred.vectors is not None:
                pt = pair_density_exact(pred, cfg.k, n, grouping="dp")
            else:
                pt = pair_density(pred, cfg.k, n, "mc", cfg.trials, cfg.seed)
        elif n <= cfg.exact_max and count_ball(cfg.k, n, mode) <= cfg.budget:
            pt = density_exact(pred, cfg.k, n, mode, cfg.budget)
        else:
            pt = density_mc(pred, cfg.k, n, cfg.trials, cfg.seed, mode)
        points.append(pt)
        report.rows.append([n, pt.value, pt.method, pt.stderr, mode])
    summary = {"mode": mode, "seed": cfg.seed}
    if len(points) >= 8:
        gr = genericity_report(points, fit_from=cfg.fit_from)
        summary.update(verdict=gr.verdict, direction=gr.direction, fit=_fit_dict(gr.fit))
    report.summary = summary
    return report


# ----------------------------------------------------------- decide sweep

def _sweep_inputs(cfg: ExperimentConfig, problem: str, n: int) -> tuple[list, str]:
    """All inputs of size n (words, or pairs split from words) or a sample of them."""
    alpha = Alphabet(cfg.k)
    if n <= cfg.exact_max:
        words = list(enumerate_sphere(alpha, n, cfg.mode))
        method = "exact"
    else:
        rng = next(block_streams(cfg.seed, 1, SWEEP_STREAM + n))[2]
        sampler = sample_reduced_words if cfg.mode == "reduced" else sample_words
        words = [tuple(int(x) for x in row) for row in sampler(cfg.k, n, cfg.trials, rng)]
        method = "mc"
    if problem != "cp":
        return words, method
    if method == "exact":
        return [(w[:j], w[j:]) for w in words for j in range(n + 1)], method
    cuts = rng.integers(0, n + 1, size=len(words))
    return [(w[:j], w[j:]) for w, j in zip(words, cuts)], method


def run_decide_sweep(cfg: ExperimentConfig) -> Report:
    """Share of inputs of each size on which the generic solver is definite.

    Exhaustive up to ``exact_max``, sampled beyond.  Where the setup has a
    total solver every definite answer is checked against it.
    """
    setup = setup_from_config(cfg)
    report = Report("decide-sweep", cfg.id, ["n", "definite", "method", "stderr", "inputs", "violations"])
    points = []
    for n in cfg.lengths:
        inputs, method = _sweep_inputs(cfg, setup.problem, n)
        definite = violations = 0
        for x in inputs:
            args = x if setup.problem == "cp" else (x,)
            v = _run(setup.generic(*args))[1]
            if v.answer is Answer.UNKNOWN:
                continue
            definite += 1
            if setup.total is not None and _run(setup.total(*args))[1].answer is not v.answer:
                violations += 1
        frac = definite / len(inputs)
        se = 0.0 if method == "exact" else math.sqrt(frac * (1 - frac) / len(inputs))
        points.append(DensityPoint(n, frac, method, cfg.mode, len(inputs) if method == "mc" else 0, se))
        report.rows.append([n, frac, method, se, len(inputs), violations])
    summary = {"problem": setup.problem, "violations": sum(r[5] for r in report.rows),
               "checked_against_total": setup.total is not None}
    if len(points) >= 8:
        gr = genericity_report(points, fit_from=cfg.fit_from)
        summary.update(verdict=gr.verdict, fit=_fit_dict(gr.fit))
    report.summary = summary
    return report


# ------------------------------------------------------------------- walk

def run_walk_experiment(cfg: ExperimentConfig) -> Report:
    N = cfg.n_max
    graph = instance_graph(cfg, (N + 1) // 2)
    b = count_unreduced(graph, N)
    report = Report("walk", cfg.id, ["n", "p_hat", "stderr", "exact", "trials"])
    for n in cfg.lengths:
        est = mc_return(graph, n, cfg.trials, cfg.seed + n)
        check_coherence(float(b[n]), est.p_hat, est.stderr, cfg.trials, f"walk length {n}")
        report.rows.append([n, est.p_hat, est.stderr, float(b[n]), cfg.trials])
    report.summary = {"graph": type(graph).__name__, "vertices": graph.num_vertices, "seed": cfg.seed}
    return report


RUNNERS = {
    "quotient": run_quotient_experiment,
    "cogrowth": run_cogrowth_experiment,
    "density": run_density_experiment,
    "decide-sweep": run_decide_sweep,
    "walk": run_walk_experiment,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    return RUNNERS[cfg.kind](cfg)
