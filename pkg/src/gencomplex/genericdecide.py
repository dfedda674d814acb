"""Partial decision algorithms for the word, membership and conjugacy problems.

The generic solvers only ever certify a negative answer: a word whose image
in a suitable quotient is nontrivial (or outside K) cannot be trivial (or in
H).  Everything else is ``Unknown``.  ``race`` runs such a solver against a
total one in simulated lock-step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Generator, Sequence

from .errors import InvalidInput, Refused, SoundnessViolation
from .freegroup import Alphabet, Word, column, cyclic_reduce, free_reduce, inverse
from .presentation import AbelianTarget, Homomorphism, Presentation, abelianization
from .stallings import SchreierRewriter, SubgroupGraph, build_subgroup_graph, make_rewriter, member

QUANTUM = 64


class Answer(str, enum.Enum):
    NO = "DefinitelyNo"
    YES = "DefinitelyYes"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    answer: Answer
    steps: int
    note: str = ""

    def as_dict(self) -> dict:
        return {"answer": self.answer.value, "steps": self.steps, "note": self.note}


VerdictSteps = Generator[int, None, Verdict]


def _run(gen: Generator) -> tuple[int, object]:
    steps = 0
    try:
        while True:
            steps += next(gen)
    except StopIteration as stop:
        return steps, stop.value


# ------------------------------------------------------------- target oracles

@dataclass(frozen=True)
class ZeroPattern:
    """K = {v : v[i] == 0 for i in coords} inside an abelian target."""

    coords: tuple[int, ...]

    def contains(self, value: Sequence[int]) -> bool:
        return all(value[i] == 0 for i in self.coords)


@dataclass(frozen=True)
class FreeSubgroup:
    """K given by its folded graph inside a free target."""

    graph: SubgroupGraph

    def contains(self, value: Word) -> bool:
        return member(self.graph, value)


TargetOracle = ZeroPattern | FreeSubgroup


def trivial_subgroup(phi: Homomorphism) -> TargetOracle:
    if phi.abelian:
        return ZeroPattern(tuple(range(phi.target.m)))
    return FreeSubgroup(build_subgroup_graph([], max(phi.target.m, 1)))


# ------------------------------------------------------------------- setups

@dataclass(frozen=True, eq=False)
class MembershipSetup:
    """Data for the partial membership algorithm.

    ``rewriter`` describes a finite-index subgroup G1 of the ambient group
    (None means G1 = G with Schreier generators equal to the ambient ones).
    ``phi`` is defined on the Schreier generators of G1 and ``kbar`` decides
    membership in the target subgroup containing phi(H).
    """

    k: int
    phi: Homomorphism
    kbar: TargetOracle
    rewriter: SchreierRewriter | None = None
    presentation: Presentation | None = None
    name: str = ""
    validated: bool = field(init=False, default=False)

    def __post_init__(self):
        rank = self.k if self.rewriter is None else self.rewriter.rank
        if self.phi.source_k != rank:
            raise InvalidInput(f"phi must be defined on {rank} Schreier generators, got {self.phi.source_k}")
        if self.rewriter is not None and self.rewriter.k != self.k:
            raise InvalidInput("rewriter is over a different alphabet")
        if isinstance(self.kbar, ZeroPattern) and not self.phi.abelian:
            raise InvalidInput("zero-pattern oracle needs an abelian target")
        if isinstance(self.kbar, FreeSubgroup) and self.phi.abelian:
            raise InvalidInput("free subgroup oracle needs a free target")
        object.__setattr__(self, "validated", self._validate())

    def _validate(self) -> bool:
        """phi must kill every relator conjugate t r t^-1, rewritten into G1."""
        rels = () if self.presentation is None else self.presentation.relators
        if self.rewriter is None:
            return all(self.phi.is_identity(self.phi.apply(r)) for r in rels)
        for r in rels:
            for t in self.rewriter.transversal:
                v, end = self.rewriter.rewrite(t + r + inverse(t))
                if end != 0 or not self.phi.is_identity(self.phi.apply(v)):
                    return False
        return True

    @property
    def rewrite_constant(self) -> int:
        return 1 if self.rewriter is None else max(self.rewriter.max_u_length, 1)


def generic_mp_steps(setup: MembershipSetup, w: Sequence[int]) -> VerdictSteps:
    if not setup.validated:
        raise Refused("setup's quotient map is not validated against the presentation")
    Alphabet(setup.k).validate(w)
    steps = 0
    if setup.rewriter is None:
        v: Word = tuple(w)
        end = 0
    else:
        rw = setup.rewriter
        parts: list[int] = []
        end = 0
        for x in w:
            c = column(x)
            parts.extend(rw.u[end][c])
            end = int(rw.s[end, c])
            steps += 1
            yield 1
        v = tuple(parts)
        if len(v) > setup.rewrite_constant * len(w):
            raise AssertionError(f"rewritten length {len(v)} exceeds {setup.rewrite_constant}*{len(w)}")
        if end != 0:
            return Verdict(Answer.NO, steps, "coset mismatch")
    image = yield from setup.phi.apply_steps(v)
    steps += len(v)
    if not setup.kbar.contains(image):
        return Verdict(Answer.NO, steps, "quotient image outside K")
    return Verdict(Answer.UNKNOWN, steps, "quotient image inside K")


def generic_mp(setup: MembershipSetup, w: Sequence[int]) -> Verdict:
    """Partial membership test: trace and rewrite through G1, then test phi(v) in K."""
    return _run(generic_mp_steps(setup, w))[1]


def generic_wp_steps(phi: Homomorphism, w: Sequence[int]) -> VerdictSteps:
    if not phi.validated:
        raise Refused("homomorphism is not a validated quotient map")
    image = yield from phi.apply_steps(w)
    if not phi.is_identity(image):
        return Verdict(Answer.NO, len(w), "quotient image nontrivial")
    return Verdict(Answer.UNKNOWN, len(w), "quotient image trivial")


def generic_wp(phi: Homomorphism, w: Sequence[int]) -> Verdict:
    """Partial word problem: w != 1 whenever phi(w) != 1 in the quotient."""
    return _run(generic_wp_steps(phi, w))[1]


def wp_setup(k: int, phi: Homomorphism, rewriter: SchreierRewriter | None = None,
             presentation: Presentation | None = None, name: str = "") -> MembershipSetup:
    """The word problem as membership of H = 1 with K = 1."""
    return MembershipSetup(k, phi, trivial_subgroup(phi), rewriter, presentation, name)


def generic_cp_steps(k: int, w1: Sequence[int], w2: Sequence[int],
                     phi: Homomorphism | None = None) -> VerdictSteps:
    if phi is None:
        phi = abelianization(k)
    if not phi.abelian:
        raise InvalidInput("conjugacy test needs an abelian quotient")
    if not phi.validated:
        raise Refused("abelian quotient is not validated")
    v1 = yield from phi.apply_steps(w1)
    v2 = yield from phi.apply_steps(w2)
    steps = len(w1) + len(w2)
    if v1 != v2:
        return Verdict(Answer.NO, steps, "abelian images differ")
    return Verdict(Answer.UNKNOWN, steps, "abelian images agree")


def generic_cp(k: int, w1: Sequence[int], w2: Sequence[int], phi: Homomorphism | None = None) -> Verdict:
    """Partial conjugacy test: different abelianizations mean not conjugate."""
    return _run(generic_cp_steps(k, w1, w2, phi))[1]


# -------------------------------------------------------------- total solvers

def free_conjugate(u: Sequence[int], v: Sequence[int]) -> bool:
    """Conjugacy in a free group: cyclic reductions are cyclic permutations."""
    cu, cv = cyclic_reduce(u), cyclic_reduce(v)
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    doubled = cu + cu
    return any(doubled[i:i + len(cv)] == cv for i in range(len(cu)))


def total_wp_steps(oracle, w: Sequence[int]) -> VerdictSteps:
    trivial = yield from oracle.steps(w)
    return Verdict(Answer.YES if trivial else Answer.NO, 0, oracle.name)


def total_mp_steps(graph: SubgroupGraph, w: Sequence[int]) -> VerdictSteps:
    """Stallings membership, one step per letter."""
    reduced = free_reduce(w)
    v = 0
    for x in reduced:
        yield 1
        v = int(graph.table[v, column(x)])
        if v < 0:
            return Verdict(Answer.NO, 0, "stallings")
    return Verdict(Answer.YES if v == 0 else Answer.NO, 0, "stallings")


def total_cp_steps(w1: Sequence[int], w2: Sequence[int]) -> VerdictSteps:
    """Free-group conjugacy; quadratic in the worst case, charged as such."""
    n = len(w1) + len(w2)
    for _ in range(max(n, 1) * max(len(cyclic_reduce(w1)), 1)):
        yield 1
    return Verdict(Answer.YES if free_conjugate(w1, w2) else Answer.NO, 0, "free conjugacy")


# ------------------------------------------------------------------- race

@dataclass(frozen=True)
class RaceLog:
    winner: str
    steps_total: int
    steps_generic: int


def race(total: Callable[[], Generator], generic: Callable[[], Generator],
         quantum: int = QUANTUM, verify: bool = False) -> tuple[Answer, RaceLog]:
    """Interleave two sound solvers in quanta of work units.

    The generic solver gets the first quantum.  The first definite answer
    wins.  With ``verify`` the loser is run to completion as well, and a
    contradiction raises ``SoundnessViolation``.
    """
    runners = {"generic": generic(), "total": total()}
    steps = {"generic": 0, "total": 0}
    result: dict[str, Verdict] = {}
    winner: str | None = None
    answer: Answer | None = None
    order = ["generic", "total"]
    while winner is None:
        if not any(name not in result for name in order):
            raise Refused("neither solver produced a definite answer")
        for name in order:
            if name in result:
                continue
            gen = runners[name]
            try:
                for _ in range(quantum):
                    steps[name] += next(gen)
            except StopIteration as stop:
                result[name] = stop.value
                if stop.value.answer is not Answer.UNKNOWN:
                    winner, answer = name, stop.value.answer
                    break
    log = RaceLog(winner, steps["total"], steps["generic"])
    if verify:
        for name in order:
            if name not in result:
                result[name] = _run(runners[name])[1]
        definite = {v.answer for v in result.values() if v.answer is not Answer.UNKNOWN}
        if len(definite) > 1:
            raise SoundnessViolation(f"solvers disagree: {result}")
    return answer, log
