"""Words over a symmetrized alphabet, free reduction, ball counts and samplers.

Letters are nonzero integers: ``i`` is the i-th generator, ``-i`` its inverse.
A word is a plain tuple of letters.  Letters are also addressed by a *column*
index ``0..2k-1`` in the order ``+1, -1, +2, -2, ...``; the inverse of column
``c`` is ``c ^ 1``.  This column order is the shortlex letter order used by
every enumeration and by canonical graph numbering.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from typing import Iterator, Literal, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidInput

Word = tuple[int, ...]
Mode = Literal["all", "reduced"]

EMPTY: Word = ()
DEFAULT_ENUM_BUDGET = 5_000_000


@dataclass(frozen=True)
class Alphabet:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInput(f"alphabet needs at least one generator, got k={self.k}")

    @property
    def d(self) -> int:
        return 2 * self.k

    @property
    def letters(self) -> tuple[int, ...]:
        """Letters in shortlex order: +1, -1, +2, -2, ..."""
        return tuple(s * i for i in range(1, self.k + 1) for s in (1, -1))

    def validate(self, w: Sequence[int]) -> Word:
        w = tuple(w)
        for x in w:
            if x == 0 or abs(x) > self.k:
                raise InvalidInput(f"letter {x} out of range for k={self.k}")
        return w


def column(x: int) -> int:
    return 2 * (abs(x) - 1) + (x < 0)


def letter(c: int) -> int:
    return (c // 2 + 1) * (-1 if c & 1 else 1)


def letter_table(k: int) -> np.ndarray:
    """Array mapping column index to letter."""
    return np.array(Alphabet(k).letters, dtype=np.int64)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def free_reduce(w: Sequence[int], alpha: Alphabet | None = None) -> Word:
    """Cancel adjacent inverse pairs with a single stack pass."""
    if alpha is not None:
        alpha.validate(w)
    stack: list[int] = []
    for x in w:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            if x == 0:
                raise InvalidInput("0 is not a letter")
            stack.append(x)
    return tuple(stack)


def concat_reduce(*words: Sequence[int]) -> Word:
    return free_reduce(itertools.chain.from_iterable(words))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def shortlex_key(w: Sequence[int]) -> tuple:
    return (len(w), tuple(column(x) for x in w))


# ---------------------------------------------------------------- counting

def count_ball_all(k: int, n: int) -> int:
    """Number of words of length <= n over 2k letters: ((2k)^(n+1) - 1)/(2k - 1)."""
    if k < 1 or n < 0:
        raise InvalidInput(f"need k >= 1 and n >= 0, got k={k}, n={n}")
    d = 2 * k
    return (d ** (n + 1) - 1) // (d - 1)


def count_sphere_reduced(k: int, n: int) -> int:
    if n == 0:
        return 1
    return 2 * k * (2 * k - 1) ** (n - 1)


def count_ball_reduced(k: int, n: int, allow_rank_one: bool = False) -> int:
    """Number of freely reduced words of length <= n.

    For k >= 2 this is 1 + k/(k-1) * ((2k-1)^n - 1).  Rank one is a separate
    case (2n + 1) and must be asked for explicitly.
    """
    if n < 0:
        raise InvalidInput(f"n must be >= 0, got {n}")
    if k == 1:
        if not allow_rank_one:
            raise InvalidInput("reduced ball formula needs k >= 2; pass allow_rank_one=True for 2n+1")
        return 2 * n + 1
    if k < 1:
        raise InvalidInput(f"k must be >= 1, got {k}")
    return 1 + k * ((2 * k - 1) ** n - 1) // (k - 1)


def count_ball(k: int, n: int, mode: Mode) -> int:
    if mode == "all":
        return count_ball_all(k, n)
    return count_ball_reduced(k, n, allow_rank_one=True)


def count_sphere(k: int, n: int, mode: Mode) -> int:
    if mode == "all":
        return (2 * k) ** n
    if k == 1:
        return 1 if n == 0 else 2
    return count_sphere_reduced(k, n)


# ------------------------------------------------------------- enumeration

def enumerate_sphere(alpha: Alphabet, n: int, mode: Mode = "all") -> Iterator[Word]:
    """Words of length exactly n in lexicographic (column) order."""
    letters = alpha.letters
    if mode == "all":
        yield from itertools.product(letters, repeat=n)
        return
    level: list[Word] = [EMPTY]
    for _ in range(n):
        level = [w + (x,) for w in level for x in letters if not w or x != -w[-1]]
    yield from level


def enumerate_ball(alpha: Alphabet, n: int, mode: Mode = "all",
                   budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[Word]:
    """Every word of length <= n exactly once, in shortlex order."""
    if n < 0:
        raise InvalidInput(f"n must be >= 0, got {n}")
    size = count_ball(alpha.k, n, mode)
    if size > budget:
        raise BudgetExceeded(
            f"ball of radius {n} over k={alpha.k} ({mode}) has {size} words, budget {budget}",
            estimate=size)
    for m in range(n + 1):
        yield from enumerate_sphere(alpha, m, mode)


def sphere_array(k: int, n: int, budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """All (2k)^n words of length n as rows of a letter array, lexicographic order."""
    d = 2 * k
    size = d ** n
    if size > budget:
        raise BudgetExceeded(f"sphere of radius {n} over k={k} has {size} words", estimate=size)
    idx = np.arange(size, dtype=np.int64)
    cols = np.empty((size, n), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        cols[:, j] = idx % d
        idx //= d
    return letter_table(k)[cols]


# ---------------------------------------------------------------- sampling

def sample_word(alpha: Alphabet, n: int, rng: np.random.Generator) -> Word:
    """Uniform word of length exactly n."""
    cols = rng.integers(0, alpha.d, size=n)
    return tuple(letter(int(c)) for c in cols)


def sample_reduced_word(alpha: Alphabet, n: int, rng: np.random.Generator) -> Word:
    """Uniform freely reduced word of length exactly n."""
    if n >= 2 and alpha.k < 2:
        raise InvalidInput("reduced words of length >= 2 need k >= 2")
    return tuple(int(x) for x in sample_reduced_words(alpha.k, n, 1, rng)[0])


def sample_words(k: int, n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """``trials`` independent uniform words of length n, one per row."""
    return letter_table(k)[rng.integers(0, 2 * k, size=(trials, n))]


def sample_reduced_words(k: int, n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """``trials`` independent uniform reduced words of length n, one per row.

    First column uniform over 2k letters, later columns uniform over the 2k-1
    letters that do not cancel the previous one.
    """
    d = 2 * k
    cols = np.empty((trials, n), dtype=np.int64)
    if n:
        cols[:, 0] = rng.integers(0, d, size=trials)
        for j in range(1, n):
            r = rng.integers(0, d - 1, size=trials)
            forbidden = cols[:, j - 1] ^ 1
            cols[:, j] = r + (r >= forbidden)
    return letter_table(k)[cols]


# ------------------------------------------------------------- text format

def format_word(w: Sequence[int]) -> str:
    """Generators a..z, inverses A..Z, the empty word as ``1``."""
    if not w:
        return "1"
    out = []
    for x in w:
        if x == 0 or abs(x) > 26:
            raise InvalidInput(f"letter {x} has no text form")
        ch = string.ascii_lowercase[abs(x) - 1]
        out.append(ch if x > 0 else ch.upper())
    return "".join(out)


def parse_word(s: str, alpha: Alphabet | None = None) -> Word:
    s = s.strip()
    if s in ("1", ""):
        return EMPTY
    w = []
    for ch in s:
        if ch in string.ascii_lowercase:
            w.append(string.ascii_lowercase.index(ch) + 1)
        elif ch in string.ascii_uppercase:
            w.append(-(string.ascii_uppercase.index(ch) + 1))
        else:
            raise InvalidInput(f"bad character {ch!r} in word {s!r}")
    if alpha is not None:
        alpha.validate(w)
    return tuple(w)


def parse_words(s: str, alpha: Alphabet | None = None) -> list[Word]:
    return [parse_word(tok, alpha) for tok in s.split()]
