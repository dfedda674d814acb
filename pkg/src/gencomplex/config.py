"""Experiment configuration files.

INI-style text with sections ``[experiment]``, ``[instance]``, ``[ranges]``
and ``[output]``.  Example::

    [experiment]
    kind = quotient
    seed = 7

    [instance]
    k = 3
    hom = kill 1

    [ranges]
    lengths = 4..60
    trials = 100000
    exact_max = 12

Homomorphisms use a small vocabulary:

    kill 1 3          send generators 1 and 3 to the identity (free target)
    abelian           exponent vector in Z^k
    weights 1 0       exponent sum with the given weights, into Z
    weights 1 1 mod 3 the same into Z/3
    identity          the identity map onto F_k
    free 2: b, 1, a   explicit images in F_2
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigError
from .freegroup import Alphabet, Word, parse_word, parse_words
from .stallings import INFINITE, build_subgroup_graph, index, make_rewriter
from .presentation import (
    FreeTarget,
    Homomorphism,
    abelianization,
    exponent_sum_map,
    kill_generators,
)

KINDS = ("quotient", "cogrowth", "density", "decide-sweep", "walk")
BUDGET_ENV = "GENCOMPLEX_BUDGET"
DEFAULT_BUDGET = 5_000_000

_SCHEMA = {
    "experiment": {"kind", "seed", "id"},
    "instance": {"k", "hom", "subgroup", "g1", "relators", "predicate", "expect", "problem", "kbar"},
    "ranges": {"n_min", "n_max", "lengths", "trials", "exact_max", "fit_from", "window", "budget", "mode"},
    "output": {"csv", "json"},
}


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    id: str = ""
    k: int = 2
    hom: str | None = None
    subgroup: list[Word] | None = None
    g1: list[Word] | None = None
    relators: list[Word] = field(default_factory=list)
    predicate: str | None = None
    expect: str | None = None
    problem: str | None = None
    kbar: tuple[int, ...] | None = None
    lengths: list[int] = field(default_factory=list)
    trials: int = 100_000
    exact_max: int = 12
    fit_from: int | None = None
    window: int = 5
    budget: int = DEFAULT_BUDGET
    mode: str = "reduced"
    csv: str | None = None
    json: str | None = None

    @property
    def n_max(self) -> int:
        return max(self.lengths)

    def rewriter(self):
        """Schreier rewriter of the finite-index subgroup ``g1``, if given."""
        if self.g1 is None:
            return None
        g = build_subgroup_graph(self.g1, self.k)
        if index(g) == INFINITE:
            raise ConfigError("g1 must have finite index")
        return make_rewriter(g)

    def hom_source_rank(self) -> int:
        rw = self.rewriter()
        return self.k if rw is None else rw.rank


def budget_override(default: int) -> int:
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{BUDGET_ENV}={raw!r} is not an integer") from exc


def _line_of(text: str, section: str, key: str | None) -> int | None:
    current = None
    for i, ln in enumerate(text.splitlines(), 1):
        s = ln.strip()
        m = re.fullmatch(r"\[(.+)\]", s)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return i
    return None


def parse_lengths(text: str) -> list[int]:
    """``4..12``, ``10..60:10`` or a space/comma separated list."""
    out: list[int] = []
    for part in re.split(r"[,\s]+", text.strip()):
        if not part:
            continue
        m = re.fullmatch(r"(\d+)\.\.(\d+)(?::(\d+))?", part)
        if m:
            lo, hi, step = int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)
            if hi < lo or step < 1:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1, step))
        else:
            out.append(int(part))
    if not out:
        raise ValueError("no lengths given")
    return sorted(set(out))


def parse_hom(text: str, k: int, relators: Sequence[Word] = ()) -> Homomorphism:
    toks = text.replace(",", " ").split()
    if not toks:
        raise ValueError("empty homomorphism")
    head, args = toks[0], toks[1:]
    rels = tuple(relators)
    if head == "kill":
        return kill_generators(k, [int(a) for a in args], rels)
    if head == "abelian":
        return abelianization(k, rels)
    if head == "identity":
        return kill_generators(k, [], rels)
    if head == "weights":
        modulus = 0
        if "mod" in args:
            i = args.index("mod")
            modulus = int(args[i + 1])
            args = args[:i]
        if len(args) != k:
            raise ValueError(f"weights needs {k} values")
        return exponent_sum_map(k, [int(a) for a in args], modulus, rels)
    if head == "free":
        m_str, _, rest = text.partition("free")[2].partition(":")
        m = int(m_str)
        target = Alphabet(m)
        images = [parse_word(s.strip(), target) for s in rest.split(",")]
        return Homomorphism(k, FreeTarget(m), tuple(images), rels)
    raise ValueError(f"unknown homomorphism {head!r}")


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None)) from exc

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", _line_of(text, section, None))
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", _line_of(text, section, key))

    def get(section: str, key: str, conv=str, default=None, required=False):
        if not cp.has_option(section, key):
            if required:
                raise ConfigError(f"missing {key!r} in [{section}]", _line_of(text, section, None))
            return default
        raw = cp.get(section, key)
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", _line_of(text, section, key)) from exc

    kind = get("experiment", "kind", required=True).strip()
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}", _line_of(text, "experiment", "kind"))
    cfg = ExperimentConfig(kind=kind, seed=get("experiment", "seed", int, required=True))
    cfg.id = get("experiment", "id", str.strip, "")
    cfg.k = get("instance", "k", int, 2)
    if cfg.k < 1:
        raise ConfigError("k must be >= 1", _line_of(text, "instance", "k"))
    alpha = Alphabet(cfg.k)
    cfg.relators = get("instance", "relators", lambda s: parse_words(s, alpha), [])
    cfg.subgroup = get("instance", "subgroup", lambda s: parse_words(s, alpha))
    cfg.g1 = get("instance", "g1", lambda s: parse_words(s, alpha))
    cfg.hom = get("instance", "hom", str.strip)
    if cfg.hom is not None:
        get("instance", "hom", lambda s: parse_hom(s, cfg.hom_source_rank(), () if cfg.g1 else cfg.relators))
    cfg.predicate = get("instance", "predicate", str.strip)
    cfg.expect = get("instance", "expect", str.strip)
    cfg.problem = get("instance", "problem", str.strip)
    cfg.kbar = get("instance", "kbar", lambda s: tuple(int(x) for x in s.split()))

    if cp.has_option("ranges", "lengths"):
        cfg.lengths = get("ranges", "lengths", parse_lengths)
    else:
        lo = get("ranges", "n_min", int, 0)
        hi = get("ranges", "n_max", int, required=True)
        if hi < lo:
            raise ConfigError("n_max < n_min", _line_of(text, "ranges", "n_max"))
        cfg.lengths = list(range(lo, hi + 1))
    cfg.trials = get("ranges", "trials", int, cfg.trials)
    cfg.exact_max = get("ranges", "exact_max", int, cfg.exact_max)
    cfg.fit_from = get("ranges", "fit_from", int, None)
    cfg.window = get("ranges", "window", int, cfg.window)
    cfg.budget = budget_override(get("ranges", "budget", int, DEFAULT_BUDGET))
    cfg.mode = get("ranges", "mode", str.strip, cfg.mode)
    if cfg.mode not in ("all", "reduced"):
        raise ConfigError("mode must be 'all' or 'reduced'", _line_of(text, "ranges", "mode"))
    cfg.csv = get("output", "csv", str.strip)
    cfg.json = get("output", "json", str.strip)

    needs = {"quotient": "hom", "cogrowth": None, "density": "predicate", "decide-sweep": "hom", "walk": None}
    need = needs[kind]
    if need and getattr(cfg, need) is None:
        raise ConfigError(f"{kind} experiment needs [instance] {need}", _line_of(text, "instance", None))
    if kind in ("cogrowth", "walk") and cfg.subgroup is None and cfg.hom is None:
        raise ConfigError(f"{kind} experiment needs a subgroup or a hom", _line_of(text, "instance", None))
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)
