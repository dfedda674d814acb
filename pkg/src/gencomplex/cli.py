"""Command line interface.

Exit codes: 0 success, 2 configuration or usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .cogrowth import cogrowth_series
from .config import ExperimentConfig, budget_override, load_config, parse_hom, parse_lengths, DEFAULT_BUDGET
from .errors import BudgetExceeded, ConfigError, InvalidInput, Refused
from .experiments import RUNNERS, Report, instance_graph, run_cogrowth_experiment, run_experiment
from .freegroup import Alphabet, parse_word, parse_words
from .genericdecide import _run, race
from .randwalk import mc_return
from .schreier import dump_graph, load_graph
from .setups import DecideSetup, load_setup, setup_from_config

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _infer_k(texts: Sequence[str], k: int | None) -> int:
    if k is not None:
        return k
    top = 0
    for t in texts:
        for ch in t:
            if ch.isalpha():
                top = max(top, ord(ch.lower()) - ord("a") + 1)
    return max(top, 2)


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, help="rank of the free group (default: from the letters used)")
    p.add_argument("--subgroup", help="generators of H, space separated (e.g. \"aa b\")")
    p.add_argument("--hom", help="quotient map (kill 1 | abelian | weights 1 0 [mod 3] | identity)")
    p.add_argument("--relators", default="", help="relators of the presented group")


def _instance_config(args, kind: str, lengths: list[int]) -> ExperimentConfig:
    if (args.subgroup is None) == (args.hom is None):
        raise ConfigError("give exactly one of --subgroup and --hom")
    k = _infer_k([args.subgroup or "", args.relators], args.k)
    alpha = Alphabet(k)
    cfg = ExperimentConfig(kind=kind, seed=getattr(args, "seed", 0) or 0, k=k, lengths=lengths)
    try:
        cfg.subgroup = None if args.subgroup is None else parse_words(args.subgroup, alpha)
        cfg.relators = parse_words(args.relators, alpha) if args.relators else []
        cfg.hom = args.hom
        if cfg.hom is not None:
            parse_hom(cfg.hom, k, cfg.relators)
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    cfg.budget = budget_override(DEFAULT_BUDGET)
    return cfg


def cmd_cogrowth(args) -> int:
    cfg = _instance_config(args, "cogrowth", list(range(args.N + 1)))
    cfg.window = args.window
    cfg.fit_from = args.fit_from
    report = run_cogrowth_experiment(cfg)
    _write(report.to_csv(), args.out)
    if args.json:
        _write(report.to_json(), args.json)
    elif args.out not in (None, "-"):
        sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_walk(args) -> int:
    if args.graph:
        try:
            with open(args.graph, encoding="utf-8") as fh:
                graph = load_graph(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read {args.graph}: {exc.strerror}") from exc
    else:
        cfg = _instance_config(args, "walk", [args.n])
        graph = instance_graph(cfg, (args.n + 1) // 2)
    est = mc_return(graph, args.n, args.trials, args.seed)
    out = est.as_dict() | {"seed": args.seed}
    _write(json.dumps(out, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_density(args) -> int:
    cfg = _instance_config(args, "density", parse_lengths(args.n)) if (args.subgroup or args.hom) else \
        ExperimentConfig(kind="density", seed=args.seed, k=args.k or 2, lengths=parse_lengths(args.n))
    cfg.seed = args.seed
    cfg.predicate = args.predicate
    cfg.mode = args.mode
    cfg.trials = args.trials
    cfg.exact_max = args.exact_max
    report = RUNNERS["density"](cfg)
    _write(report.to_csv(), args.out)
    return EXIT_OK


def _decide_setup(args) -> DecideSetup:
    if args.setup:
        setup = load_setup(args.setup)
        if args.problem and setup.problem != args.problem:
            raise ConfigError(f"setup is for {setup.problem}, not {args.problem}")
        return setup
    texts = [args.word or "", args.words or "", args.w1 or "", args.w2 or "", args.relators, args.subgroup or ""]
    k = _infer_k(texts, args.k)
    alpha = Alphabet(k)
    cfg = ExperimentConfig(kind="decide-sweep", seed=0, k=k, lengths=[0])
    cfg.problem = args.problem or "wp"
    try:
        cfg.relators = parse_words(args.relators, alpha) if args.relators else []
        cfg.subgroup = parse_words(args.subgroup, alpha) if args.subgroup else None
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    cfg.hom = args.hom or "abelian"
    if args.kbar is not None:
        cfg.kbar = tuple(int(x) for x in args.kbar.split())
    return setup_from_config(cfg)


def cmd_decide(args) -> int:
    setup = _decide_setup(args)
    alpha = Alphabet(setup.k)
    try:
        if setup.problem == "cp":
            if args.w1 is None or args.w2 is None:
                raise ConfigError("cp needs --w1 and --w2")
            inputs = [(parse_word(args.w1, alpha), parse_word(args.w2, alpha))]
        elif args.words is not None:
            inputs = [(w,) for w in parse_words(args.words, alpha)]
        elif args.word is not None:
            inputs = [(parse_word(args.word, alpha),)]
        else:
            raise ConfigError("give --word or --words")
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    lines = []
    for x in inputs:
        if args.race:
            if setup.total is None:
                raise ConfigError("setup has no total solver to race against")
            answer, log = race(lambda: setup.total(*x), lambda: setup.generic(*x), verify=args.verify)
            out = {"answer": answer.value, "winner": log.winner,
                   "steps_total": log.steps_total, "steps_generic": log.steps_generic}
        else:
            out = _run(setup.generic(*x))[1].as_dict()
        lines.append(json.dumps(out, sort_keys=True))
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    report: Report = run_experiment(cfg)
    csv_path = args.out or cfg.csv
    json_path = args.json or cfg.json
    _write(report.to_csv(), csv_path)
    if json_path:
        _write(report.to_json(), json_path)
    return EXIT_OK


def cmd_graph_dump(args) -> int:
    cfg = _instance_config(args, "cogrowth", [2 * args.radius])
    graph = instance_graph(cfg, args.radius)
    _write(dump_graph(graph), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gencomplex", description="Generic-case complexity and cogrowth experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cogrowth", help="cogrowth series of a coset graph as CSV")
    _instance_args(c)
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--window", type=int, default=5)
    c.add_argument("--fit-from", type=int)
    c.add_argument("--out")
    c.add_argument("--json")
    c.set_defaults(func=cmd_cogrowth)

    w = sub.add_parser("walk", help="Monte Carlo return probability")
    _instance_args(w)
    w.add_argument("--graph", help="graph file written by 'graph dump'")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--trials", type=int, default=100_000)
    w.add_argument("--seed", type=int, required=True)
    w.add_argument("--out")
    w.set_defaults(func=cmd_walk)

    d = sub.add_parser("density", help="densities of a word or pair set")
    _instance_args(d)
    d.add_argument("--predicate", required=True,
                   help="kernel | not-kernel | equal-image | subgroup | zero-exponent I | nontrivial")
    d.add_argument("--n", required=True, help="lengths, e.g. 0..10")
    d.add_argument("--mode", choices=["all", "reduced"], default="all")
    d.add_argument("--trials", type=int, default=100_000)
    d.add_argument("--exact-max", type=int, default=8)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_density)

    q = sub.add_parser("decide", help="run a generic decision procedure")
    _instance_args(q)
    q.add_argument("--problem", choices=["wp", "mp", "cp"])
    q.add_argument("--setup", help="setup config file")
    q.add_argument("--kbar", help="zero-pattern coordinates of K")
    q.add_argument("--word")
    q.add_argument("--words")
    q.add_argument("--w1")
    q.add_argument("--w2")
    q.add_argument("--race", action="store_true", help="race against the setup's total solver")
    q.add_argument("--verify", action="store_true", help="with --race, run both solvers to completion")
    q.add_argument("--out")
    q.set_defaults(func=cmd_decide)

    e = sub.add_parser("experiment", help="run an experiment config")
    e.add_argument("config")
    e.add_argument("--seed", type=int)
    e.add_argument("--out")
    e.add_argument("--json")
    e.set_defaults(func=cmd_experiment)

    g = sub.add_parser("graph", help="graph utilities")
    gsub = g.add_subparsers(dest="graph_command", required=True, parser_class=_Parser)
    gd = gsub.add_parser("dump", help="write a coset graph table")
    _instance_args(gd)
    gd.add_argument("--radius", type=int, default=4, help="ball radius for infinite quotients")
    gd.add_argument("--out")
    gd.set_defaults(func=cmd_graph_dump)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        extra = "" if exc.attained is None else f" (attained {exc.attained})"
        print(f"budget exceeded: {exc}{extra}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidInput, Refused) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
