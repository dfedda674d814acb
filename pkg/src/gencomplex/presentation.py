"""Presentations, homomorphisms to free and abelian targets, word-problem oracles.

Three total word-problem solvers are provided: free reduction (free groups),
exponent vectors (free and finite abelian groups) and Dehn's algorithm for
presentations satisfying C'(1/6).  Every solver also has a step-wise form, a
generator yielding once per unit of work, which is what ``race`` interleaves.
"""

from __future__ import annotations

import functools

import string
from dataclasses import dataclass, field
from typing import Generator, Sequence, Union

import numpy as np

from .errors import ConfigError, InvalidInput, Refused
from .freegroup import (
    Alphabet,
    Word,
    column,
    concat_reduce,
    cyclic_reduce,
    format_word,
    free_reduce,
    inverse,
    letter,
    parse_word,
)

Steps = Generator[int, None, bool]


@dataclass(frozen=True)
class FreeTarget:
    m: int


@dataclass(frozen=True)
class AbelianTarget:
    """Z^m, or a product of cyclic groups when ``moduli`` is given (0 means Z)."""

    m: int
    moduli: tuple[int, ...] = ()

    def __post_init__(self):
        if self.moduli and len(self.moduli) != self.m:
            raise InvalidInput(f"need {self.m} moduli, got {len(self.moduli)}")
        if any(q < 0 for q in self.moduli):
            raise InvalidInput("moduli must be >= 0")

    def normalize(self, v: Sequence[int]) -> tuple[int, ...]:
        if not self.moduli:
            return tuple(int(x) for x in v)
        return tuple(int(x) % q if q else int(x) for x, q in zip(v, self.moduli))

    @property
    def finite(self) -> bool:
        return bool(self.moduli) and all(q > 0 for q in self.moduli)


Target = Union[FreeTarget, AbelianTarget]
Image = Union[Word, tuple[int, ...]]


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        rels = []
        for r in self.relators:
            self.alphabet.validate(r)
            c = cyclic_reduce(r)
            if not c:
                raise InvalidInput(f"relator {format_word(r)} is trivial in the free group")
            rels.append(c)
        object.__setattr__(self, "relators", tuple(rels))

    @property
    def k(self) -> int:
        return self.alphabet.k

    def symmetrized(self) -> list[Word]:
        """All cyclic shifts of every relator and its inverse, one entry per position."""
        out = []
        for r in self.relators:
            for s in (r, inverse(r)):
                out.extend(s[i:] + s[:i] for i in range(len(s)))
        return out

    def __str__(self):
        gens = " ".join(string.ascii_lowercase[i] for i in range(self.k))
        rels = " ".join(format_word(r) for r in self.relators)
        return f"gens: {gens}\nrels: {rels}"


def parse_presentation(text: str) -> Presentation:
    gens: list[str] | None = None
    rels: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ConfigError(f"expected 'gens:' or 'rels:', got {line!r}", lineno)
        key = key.strip()
        if key == "gens":
            gens = value.split()
        elif key == "rels":
            rels.extend(value.split())
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)
    if not gens:
        raise ConfigError("presentation has no 'gens:' line")
    expected = list(string.ascii_lowercase[: len(gens)])
    if gens != expected:
        raise ConfigError(f"generators must be named {' '.join(expected)}")
    alpha = Alphabet(len(gens))
    try:
        return Presentation(alpha, tuple(parse_word(r, alpha) for r in rels))
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc


# ------------------------------------------------------------ homomorphisms

@dataclass(frozen=True)
class Homomorphism:
    """A map from F(x_1..x_k) given by generator images.

    If ``relators`` is supplied (possibly empty), every relator is checked to
    map to the identity and the map is marked ``validated``: it then descends
    to a homomorphism of the presented group.
    """

    source_k: int
    target: Target
    images: tuple
    relators: tuple[Word, ...] | None = None
    validated: bool = field(init=False, default=False)

    def __post_init__(self):
        if len(self.images) != self.source_k:
            raise InvalidInput(f"need {self.source_k} images, got {len(self.images)}")
        if isinstance(self.target, FreeTarget):
            talpha = Alphabet(self.target.m) if self.target.m else None
            imgs = []
            for im in self.images:
                im = tuple(im)
                if im and talpha is None:
                    raise InvalidInput("trivial target admits only empty images")
                if talpha is not None:
                    talpha.validate(im)
                imgs.append(free_reduce(im))
        else:
            imgs = []
            for im in self.images:
                if len(im) != self.target.m:
                    raise InvalidInput(f"abelian image {im} should have length {self.target.m}")
                imgs.append(self.target.normalize(im))
        object.__setattr__(self, "images", tuple(imgs))
        if self.relators is not None:
            for r in self.relators:
                if not self.is_identity(self.apply(r)):
                    raise InvalidInput(f"relator {format_word(r)} does not map to the identity")
            object.__setattr__(self, "validated", True)

    @property
    def abelian(self) -> bool:
        return isinstance(self.target, AbelianTarget)

    def identity(self) -> Image:
        if self.abelian:
            return (0,) * self.target.m
        return ()

    def is_identity(self, value: Image) -> bool:
        return value == self.identity()

    def image_of(self, x: int) -> Image:
        im = self.images[abs(x) - 1]
        if x > 0:
            return im
        if self.abelian:
            return self.target.normalize([-v for v in im])
        return inverse(im)

    def multiply(self, value: Image, x: int) -> Image:
        """Canonical form of ``value * phi(x)``."""
        if self.abelian:
            im = self.images[abs(x) - 1]
            s = 1 if x > 0 else -1
            return self.target.normalize([a + s * b for a, b in zip(value, im)])
        return concat_reduce(value, self.image_of(x))

    def apply(self, w: Sequence[int]) -> Image:
        if any(x == 0 or abs(x) > self.source_k for x in w):
            raise InvalidInput(f"word {tuple(w)} is not over {self.source_k} generators")
        if self.abelian:
            v = np.zeros(self.target.m, dtype=np.int64)
            for x in w:
                im = self.images[abs(x) - 1]
                if x > 0:
                    v += im
                else:
                    v -= im
            return self.target.normalize(v)
        return concat_reduce(*(self.image_of(x) for x in w))

    @functools.cached_property
    def _signed_images(self) -> dict[int, tuple[int, ...]]:
        out = {}
        for i, im in enumerate(self.images, start=1):
            out[i] = tuple(im)
            out[-i] = tuple(-a for a in im)
        return out

    def apply_steps(self, w: Sequence[int]) -> Generator[int, None, Image]:
        """Step-wise ``apply``: yields once per source letter."""
        if not self.abelian:
            value = self.identity()
            for x in w:
                value = self.multiply(value, x)
                yield 1
            return value
        # sums are reduced modulo the target only once, at the end
        signed = self._signed_images
        acc = [0] * self.target.m
        for x in w:
            im = signed.get(x)
            if im is None:
                raise InvalidInput(f"letter {x} is not over {self.source_k} generators")
            for i in range(len(acc)):
                acc[i] += im[i]
            yield 1
        return self.target.normalize(acc)

    def trivial_mask(self, words: np.ndarray) -> np.ndarray:
        """Vectorized ``is_identity(apply(w))`` over the rows of a letter array."""
        if self.abelian:
            vecs = self.exponent_matrix()
            cols = _columns(words)
            total = vecs[cols].sum(axis=1) if words.shape[1] else np.zeros((len(words), self.target.m), np.int64)
            if self.target.moduli:
                mod = np.array([q if q else 0 for q in self.target.moduli])
                safe = np.where(mod > 0, mod, 1)
                total = np.where(mod > 0, total % safe, total)
            return ~np.any(total != 0, axis=1)
        if any(len(im) > 1 for im in self.images):
            return np.array([self.is_identity(self.apply(tuple(int(x) for x in row))) for row in words])
        # letter-to-letter or killed generators: reduce the images with a stack per row
        subst = np.zeros(2 * self.source_k, dtype=np.int64)
        for c in range(2 * self.source_k):
            im = self.image_of(letter(c))
            subst[c] = im[0] if im else 0
        img = subst[_columns(words)]
        rows, n = img.shape
        stack = np.zeros((rows, n + 1), dtype=np.int64)
        sp = np.zeros(rows, dtype=np.int64)
        ar = np.arange(rows)
        for j in range(n):
            x = img[:, j]
            top = stack[ar, sp]
            live = x != 0
            pop = live & (sp > 0) & (top == -x)
            push = live & ~pop
            sp = sp - pop
            sp = sp + push
            stack[ar[push], sp[push]] = x[push]
        return sp == 0

    def exponent_matrix(self) -> np.ndarray:
        """Row c holds the image vector of the letter with column c (abelian targets)."""
        rows = []
        for c in range(2 * self.source_k):
            rows.append(self.image_of(letter(c)))
        return np.array(rows, dtype=np.int64).reshape(2 * self.source_k, self.target.m)


def _columns(words: np.ndarray) -> np.ndarray:
    return 2 * (np.abs(words) - 1) + (words < 0)


def apply_hom(phi: Homomorphism, w: Sequence[int]) -> Image:
    return phi.apply(w)


def abelianization(k: int, relators: Sequence[Word] | None = ()) -> Homomorphism:
    """F_k -> Z^k by exponent sums; validated against ``relators`` when given."""
    images = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
    rels = None if relators is None else tuple(relators)
    return Homomorphism(k, AbelianTarget(k), images, rels)


def kill_generators(k: int, killed: Sequence[int], relators: Sequence[Word] | None = ()) -> Homomorphism:
    """F_k -> F_{k-|killed|} sending the listed generators (1-based) to the identity."""
    killed = set(killed)
    if not killed <= set(range(1, k + 1)):
        raise InvalidInput(f"killed generators {sorted(killed)} not within 1..{k}")
    images, nxt = [], 1
    for i in range(1, k + 1):
        if i in killed:
            images.append(())
        else:
            images.append((nxt,))
            nxt += 1
    rels = None if relators is None else tuple(relators)
    return Homomorphism(k, FreeTarget(k - len(killed)), tuple(images), rels)


def exponent_sum_map(k: int, weights: Sequence[int], modulus: int = 0,
                     relators: Sequence[Word] | None = ()) -> Homomorphism:
    """F_k -> Z (or Z/modulus) sending generator i to ``weights[i]``."""
    target = AbelianTarget(1, (modulus,)) if modulus else AbelianTarget(1)
    rels = None if relators is None else tuple(relators)
    return Homomorphism(k, target, tuple((w,) for w in weights), rels)


# ----------------------------------------------------- small cancellation

@dataclass(frozen=True)
class SmallCancellationReport:
    satisfies: bool
    max_piece: int
    min_relator: int


def _common_prefix(u: Sequence[int], v: Sequence[int]) -> int:
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return n


def check_small_cancellation(P: Presentation, lambda_den: int = 6) -> SmallCancellationReport:
    """Longest piece over distinct positions of the symmetrized relators.

    A piece is a proper common prefix of two position-distinct symmetrized
    relators, so proper powers such as a^6 produce long pieces.
    """
    sym = P.symmetrized()
    if not sym:
        return SmallCancellationReport(True, 0, 0)
    max_piece = 0
    for i in range(len(sym)):
        for j in range(i + 1, len(sym)):
            cp = _common_prefix(sym[i], sym[j])
            cp = min(cp, len(sym[i]) - 1, len(sym[j]) - 1)
            max_piece = max(max_piece, cp)
    shortest = min(len(r) for r in P.relators)
    return SmallCancellationReport(max_piece * lambda_den < shortest, max_piece, shortest)


# ------------------------------------------------------------ Dehn's algorithm

def _longest_half_match(w: Word, i: int, by_first: dict[int, list[Word]]) -> tuple[int, Word] | None:
    best: tuple[int, Word] | None = None
    for r in by_first.get(w[i], ()):
        m = _common_prefix(w[i:], r)
        if 2 * m > len(r) and (best is None or m > best[0]):
            best = (m, r)
    return best


def dehn_reduce_steps(P: Presentation, w: Sequence[int]) -> Generator[int, None, Word]:
    """Step-wise Dehn reduction; yields once per scanned position."""
    by_first: dict[int, list[Word]] = {}
    for r in P.symmetrized():
        by_first.setdefault(r[0], []).append(r)
    w = free_reduce(P.alphabet.validate(w))
    while True:
        for i in range(len(w)):
            yield 1
            hit = _longest_half_match(w, i, by_first)
            if hit is not None:
                m, r = hit
                w = free_reduce(w[:i] + inverse(r[m:]) + w[i + m:])
                break
        else:
            return w


def dehn_reduce(P: Presentation, w: Sequence[int]) -> Word:
    """Replace any subword that is more than half of a symmetrized relator
    r = u v by v^-1 until none is left.

    Scans left to right and takes the longest match at the first position
    that has one.  Under C'(1/6) the result is empty iff w is trivial.
    """
    return _drain(dehn_reduce_steps(P, w))[1]


def has_long_relator_subword(P: Presentation, w: Word) -> bool:
    by_first: dict[int, list[Word]] = {}
    for r in P.symmetrized():
        by_first.setdefault(r[0], []).append(r)
    return any(_longest_half_match(w, i, by_first) is not None for i in range(len(w)))


def _drain(gen: Generator):
    steps = 0
    try:
        while True:
            steps += next(gen)
    except StopIteration as stop:
        return steps, stop.value


# ------------------------------------------------------- word problem oracles

class WPOracle:
    """A total solver: ``is_identity(w)`` answers the word problem of its group."""

    k: int
    name: str = "oracle"

    def steps(self, w: Sequence[int]) -> Steps:
        raise NotImplementedError

    def is_identity(self, w: Sequence[int]) -> bool:
        return _drain(self.steps(w))[1]


class FreeOracle(WPOracle):
    name = "free"

    def __init__(self, k: int):
        self.k = k
        self.alphabet = Alphabet(k)

    def steps(self, w):
        self.alphabet.validate(w)
        stack: list[int] = []
        for x in w:
            if stack and stack[-1] == -x:
                stack.pop()
            else:
                stack.append(x)
            yield 1
        return not stack


class AbelianOracle(WPOracle):
    """Word problem of the abelian group phi(F_k) (exponent vectors)."""

    name = "abelian"

    def __init__(self, phi: Homomorphism):
        if not phi.abelian:
            raise InvalidInput("AbelianOracle needs an abelian target")
        self.k = phi.source_k
        self.phi = phi

    def steps(self, w):
        value = yield from self.phi.apply_steps(w)
        return self.phi.is_identity(value)


class DehnOracle(WPOracle):
    name = "dehn"

    def __init__(self, P: Presentation):
        report = check_small_cancellation(P, 6)
        if not report.satisfies:
            raise Refused(f"presentation fails C'(1/6): piece of length {report.max_piece}")
        self.k = P.k
        self.presentation = P

    def steps(self, w):
        reduced = yield from dehn_reduce_steps(self.presentation, w)
        return not reduced


def wp_oracle(oracle: WPOracle, w: Sequence[int]) -> bool:
    return oracle.is_identity(w)
