"""Reduced words in finitely generated free groups and Cayley-graph balls.

A letter is a pair ``(generator, exponent)`` with generators numbered from 1
and exponent in {+1, -1}.  Words are reduced eagerly, so two equal group
elements always compare equal.

String form: generator ``j`` is printed with ``generator_names(k)[j-1]``,
capitalised for the inverse; the identity is ``"e"``.  For rank 2 the names
are ``s, t``, so ``"stS"`` is ``s t s^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GeneratorRangeError, ParameterError, RankMismatchError, ResourceError

Letter = tuple[int, int]

DEFAULT_BALL_CAP = 10**6

_GENERIC_NAMES = "abcdfghijklmnopqrstuvwxyz"  # no "e": it denotes the identity


def generator_names(rank: int) -> str:
    if rank == 1:
        return "s"
    if rank == 2:
        return "st"
    if rank > len(_GENERIC_NAMES):
        raise ParameterError(f"no default names for rank {rank}")
    return _GENERIC_NAMES[:rank]


def _check_letters(letters: Iterable[Letter], rank: int) -> list[Letter]:
    out = []
    for g, e in letters:
        if not 1 <= g <= rank:
            raise GeneratorRangeError(f"generator {g} outside 1..{rank}")
        if e not in (1, -1):
            raise ParameterError(f"exponent must be +1 or -1, got {e}")
        out.append((int(g), int(e)))
    return out


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for g, e in letters:
        if stack and stack[-1][0] == g and stack[-1][1] == -e:
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


@dataclass(frozen=True, slots=True)
class ReducedWord:
    rank: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        for i in range(len(self.letters) - 1):
            (g, e), (h, f) = self.letters[i], self.letters[i + 1]
            if g == h and e == -f:
                raise ParameterError("letters are not freely reduced; use reduce()")

    @classmethod
    def identity(cls, rank: int) -> "ReducedWord":
        return cls(rank, ())

    @classmethod
    def generator(cls, rank: int, g: int, exponent: int = 1) -> "ReducedWord":
        return cls(rank, tuple(_check_letters([(g, exponent)], rank)))

    @classmethod
    def parse(cls, text: str, rank: int, names: str | None = None) -> "ReducedWord":
        return parse_word(text, rank, names)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return multiply(self, other)

    def inverse(self) -> "ReducedWord":
        return invert(self)

    def __pow__(self, n: int) -> "ReducedWord":
        base = self if n >= 0 else self.inverse()
        out = ReducedWord.identity(self.rank)
        for _ in range(abs(n)):
            out = out * base
        return out

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def generators_used(self) -> set[int]:
        return {g for g, _ in self.letters}

    def to_string(self, names: str | None = None) -> str:
        if not self.letters:
            return "e"
        names = names or generator_names(self.rank)
        return "".join(names[g - 1] if e == 1 else names[g - 1].upper() for g, e in self.letters)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"ReducedWord({self.to_string()!r}, rank={self.rank})"

    def sort_key(self) -> tuple:
        return (len(self.letters), self.letters)


def reduce(letters: Sequence[Letter], rank: int) -> ReducedWord:
    """Freely reduce a letter sequence over generators ``1..rank``."""
    return ReducedWord(rank, _free_reduce(_check_letters(letters, rank)))


def multiply(a: ReducedWord, b: ReducedWord) -> ReducedWord:
    if a.rank != b.rank:
        raise RankMismatchError(f"rank {a.rank} vs {b.rank}")
    left = list(a.letters)
    i = 0
    bl = b.letters
    while left and i < len(bl) and left[-1][0] == bl[i][0] and left[-1][1] == -bl[i][1]:
        left.pop()
        i += 1
    return ReducedWord(a.rank, tuple(left) + bl[i:])


def invert(a: ReducedWord) -> ReducedWord:
    return ReducedWord(a.rank, tuple((g, -e) for g, e in reversed(a.letters)))


def parse_word(text: str, rank: int, names: str | None = None) -> ReducedWord:
    text = text.strip()
    if text in ("e", ""):
        return ReducedWord.identity(rank)
    names = names or generator_names(rank)
    letters = []
    for ch in text:
        idx = names.find(ch.lower())
        if idx < 0 or idx >= rank:
            raise GeneratorRangeError(f"letter {ch!r} is not a generator of rank {rank} ({names})")
        letters.append((idx + 1, -1 if ch.isupper() else 1))
    return reduce(letters, rank)


def all_letters(rank: int) -> list[Letter]:
    """Letters in enumeration order: lexicographic in (generator, exponent)."""
    return [(g, e) for g in range(1, rank + 1) for e in (-1, 1)]


def ball_size(rank: int, radius: int) -> int:
    if rank < 1 or radius < 0:
        raise ParameterError("need rank >= 1 and radius >= 0")
    if rank == 1:
        return 2 * radius + 1
    return 1 + 2 * rank * ((2 * rank - 1) ** radius - 1) // (2 * rank - 2)


class Ball:
    """All reduced words of length <= radius, with deterministic integer ids.

    Ids run breadth-first by length and lexicographically by letters within a
    length.  Instances are treated as immutable.
    """

    def __init__(self, rank: int, radius: int, elements: list[ReducedWord]):
        self.rank = rank
        self.radius = radius
        self.elements = tuple(elements)
        self.index = {w: i for i, w in enumerate(self.elements)}
        self.lengths = np.array([len(w) for w in self.elements], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, w: ReducedWord) -> bool:
        return w in self.index

    def __repr__(self) -> str:
        return f"Ball(rank={self.rank}, radius={self.radius}, size={len(self)})"

    def id_of(self, w: ReducedWord) -> int:
        try:
            return self.index[w]
        except KeyError:
            raise KeyError(f"{w} is outside {self!r}") from None

    @cached_property
    def letters(self) -> list[Letter]:
        return all_letters(self.rank)

    def _table(self, left: bool) -> np.ndarray:
        letters = self.letters
        table = np.full((len(self), len(letters)), -1, dtype=np.int64)
        for i, w in enumerate(self.elements):
            for j, (g, e) in enumerate(letters):
                a = ReducedWord(self.rank, ((g, e),))
                prod = a * w if left else w * a
                table[i, j] = self.index.get(prod, -1)
        return table

    @cached_property
    def left_table(self) -> np.ndarray:
        """``left_table[i, j]`` is the id of ``letter_j * elements[i]`` or -1."""
        return self._table(left=True)

    @cached_property
    def right_table(self) -> np.ndarray:
        """``right_table[i, j]`` is the id of ``elements[i] * letter_j`` or -1."""
        return self._table(left=False)

    def letter_index(self, letter: Letter) -> int:
        g, e = letter
        return 2 * (g - 1) + (0 if e == -1 else 1)


def enumerate_ball(rank: int, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
    size = ball_size(rank, radius)
    if size > cap:
        raise ResourceError(f"ball of rank {rank}, radius {radius} has {size} elements > cap {cap}")
    letters = all_letters(rank)
    layer = [ReducedWord.identity(rank)]
    elements = list(layer)
    for _ in range(radius):
        nxt = []
        for w in layer:
            last = w.letters[-1] if w.letters else None
            for g, e in letters:
                if last is not None and last[0] == g and last[1] == -e:
                    continue
                nxt.append(ReducedWord(rank, w.letters + ((g, e),)))
        elements.extend(nxt)
        layer = nxt
    return Ball(rank, radius, elements)
