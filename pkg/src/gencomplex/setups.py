"""Decision-problem setups: a generic partial solver paired with a total one.

Setups are described by config files (``problem``, ``hom``, ``relators``,
``subgroup``, ``g1``, ``kbar`` under ``[instance]``); the ones shipped with
the package live in ``gencomplex/data``.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .config import ExperimentConfig, load_config, parse_config, parse_hom
from .errors import ConfigError
from .freegroup import Alphabet
from .genericdecide import (
    Answer,
    MembershipSetup,
    Verdict,
    VerdictSteps,
    ZeroPattern,
    generic_cp_steps,
    generic_mp_steps,
    generic_wp_steps,
    total_cp_steps,
    total_mp_steps,
    total_wp_steps,
    trivial_subgroup,
    wp_setup,
)
from .presentation import (
    AbelianOracle,
    DehnOracle,
    FreeOracle,
    Presentation,
    abelianization,
    check_small_cancellation,
)
from .stallings import build_subgroup_graph


@dataclass(frozen=True, eq=False)
class DecideSetup:
    """``generic`` and ``total`` map an input (a word, or a pair for cp) to a step generator."""

    name: str
    problem: str
    k: int
    generic: Callable[..., VerdictSteps]
    total: Callable[..., VerdictSteps] | None
    detail: object = None


def _presentation(cfg: ExperimentConfig) -> Presentation | None:
    if not cfg.relators:
        return None
    return Presentation(Alphabet(cfg.k), tuple(cfg.relators))


def _wp_total(cfg: ExperimentConfig, P: Presentation | None):
    if P is None:
        return FreeOracle(cfg.k)
    if check_small_cancellation(P).satisfies:
        return DehnOracle(P)
    if _presents_free_abelian(P):
        return AbelianOracle(abelianization(cfg.k, P.relators))
    return None


def _presents_free_abelian(P: Presentation) -> bool:
    """True when the relators are exactly one commutator per pair of generators."""
    pairs = set()
    for r in P.relators:
        if len(r) != 4 or r[2] != -r[0] or r[3] != -r[1] or abs(r[0]) == abs(r[1]):
            return False
        pairs.add(frozenset((abs(r[0]), abs(r[1]))))
    k = P.k
    return len(pairs) == k * (k - 1) // 2


def setup_from_config(cfg: ExperimentConfig) -> DecideSetup:
    problem = cfg.problem or "wp"
    name = cfg.id or problem
    P = _presentation(cfg)
    if problem == "wp":
        if cfg.hom is None:
            raise ConfigError("wp setup needs a hom")
        rw = cfg.rewriter()
        phi = parse_hom(cfg.hom, cfg.hom_source_rank(), () if rw else cfg.relators)
        total = _wp_total(cfg, P)
        if rw is None:
            generic = lambda w: generic_wp_steps(phi, w)
        else:
            ms = wp_setup(cfg.k, phi, rw, P, name)
            generic = lambda w: generic_mp_steps(ms, w)
        tot = None if total is None else (lambda w: total_wp_steps(total, w))
        return DecideSetup(name, problem, cfg.k, generic, tot, phi)
    if problem == "mp":
        if cfg.subgroup is None or cfg.hom is None:
            raise ConfigError("mp setup needs subgroup and hom")
        if P is not None:
            raise ConfigError("mp setups run in the free group; drop relators")
        rw = cfg.rewriter()
        phi = parse_hom(cfg.hom, cfg.hom_source_rank(), ())
        if cfg.kbar is not None:
            kbar = ZeroPattern(cfg.kbar)
        else:
            kbar = trivial_subgroup(phi)
        ms = MembershipSetup(cfg.k, phi, kbar, rw, None, name)
        h = build_subgroup_graph(cfg.subgroup, cfg.k)
        for gen in cfg.subgroup:
            v = gen if rw is None else rw.rewrite(gen)[0]
            if rw is not None and rw.rewrite(gen)[1] != 0:
                raise ConfigError("subgroup is not contained in g1")
            if not kbar.contains(phi.apply(v)):
                raise ConfigError("kbar does not contain the image of every subgroup generator")
        return DecideSetup(name, problem, cfg.k, lambda w: generic_mp_steps(ms, w),
                           lambda w: total_mp_steps(h, w), ms)
    if problem == "cp":
        phi = parse_hom(cfg.hom or "abelian", cfg.k, cfg.relators)
        if P is None:
            total = lambda w1, w2: total_cp_steps(w1, w2)
        elif _presents_free_abelian(P):
            abel = abelianization(cfg.k, P.relators)
            total = lambda w1, w2: _abelian_equal_steps(abel, w1, w2)
        else:
            total = None
        return DecideSetup(name, problem, cfg.k, lambda w1, w2: generic_cp_steps(cfg.k, w1, w2, phi), total, phi)
    raise ConfigError(f"unknown problem {problem!r}")


def _abelian_equal_steps(phi, w1, w2) -> VerdictSteps:
    """Conjugacy in an abelian group is equality."""
    v1 = yield from phi.apply_steps(w1)
    v2 = yield from phi.apply_steps(w2)
    return Verdict(Answer.YES if v1 == v2 else Answer.NO, 0, "abelian equality")


def load_setup(path: str) -> DecideSetup:
    return setup_from_config(load_config(path))


def shipped_setup_names() -> list[str]:
    files = resources.files("gencomplex") / "data"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cfg"))


def shipped_config(name: str) -> ExperimentConfig:
    path = resources.files("gencomplex") / "data" / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError(f"no shipped setup {name!r}")
    return parse_config(path.read_text(encoding="utf-8"))


def shipped_setups() -> list[DecideSetup]:
    return [setup_from_config(shipped_config(n)) for n in shipped_setup_names()
            if shipped_config(n).kind == "decide-sweep"]
