"""Affine actions and 1-cocycles defined by their values on generators.

A cocycle on a group generated by ``k`` letters is fixed by ``b(s_1..s_k)``;
on any word it is extended by

    b(x_1 ... x_n) = b(x_1) + pi(x_1) b(x_2 ... x_n),   b(s^-1) = -pi(s^-1) b(s).

Representations only need to say how a single letter acts on a carrier
vector, so the same engine serves regular representations of free groups and
amalgams, shifts of ``l^2(Z)`` and diagonal unitaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import ParameterError, RankMismatchError, TruncationError
from .freegroup import Ball, Letter, ReducedWord, multiply
from .group_algebra import AlgebraElement, FiniteFunction
from .io_utils import csv_text, read_csv


class Representation:
    """Isometric linear action of the free group on ``rank`` letters."""

    rank: int

    def act_letter(self, letter: Letter, v):
        raise NotImplementedError

    def zero(self):
        raise NotImplementedError

    def norm(self, v) -> float:
        if isinstance(v, np.ndarray):
            return float(np.linalg.norm(v))
        return v.norm()

    def act(self, word: ReducedWord, v):
        for letter in reversed(word.letters):
            v = self.act_letter(letter, v)
        return v

    def act_algebra(self, f: AlgebraElement, v):
        """``pi(f) v = sum_h f(h) pi(h) v``."""
        out = self.zero()
        for h, c in f.sorted_items():
            out = out + self.act(h, v) * c
        return out


class GroupLeftRegular(Representation):
    """Left translation on finitely supported functions over a group.

    ``left_mul(letter, element)`` returns the group element ``letter * element``;
    no truncation ever happens.
    """

    def __init__(self, rank: int, left_mul: Callable[[Letter, Any], Any],
                 zero_factory: Callable[[], FiniteFunction] = FiniteFunction):
        self.rank = rank
        self._left_mul = left_mul
        self._zero = zero_factory

    def act_letter(self, letter, v):
        return v.map_keys(lambda x: self._left_mul(letter, x))

    def zero(self):
        return self._zero()


def free_group_regular(rank: int) -> GroupLeftRegular:
    """Exact left regular representation of ``F_rank`` on ``AlgebraElement`` carriers."""
    cache: dict[Letter, ReducedWord] = {}

    def left_mul(letter, w):
        a = cache.get(letter)
        if a is None:
            a = cache[letter] = ReducedWord(rank, (letter,))
        return multiply(a, w)

    return GroupLeftRegular(rank, left_mul, lambda: AlgebraElement.zero(rank))


def integer_shift() -> GroupLeftRegular:
    """Bilateral shift on ``l^2(Z)``: the generator maps ``delta_n`` to ``delta_{n+1}``."""
    return GroupLeftRegular(1, lambda letter, n: n + letter[1])


class BallRegular(Representation):
    """Left regular action on dense vectors over a ball; raises on overflow."""

    def __init__(self, ball: Ball):
        self.rank = ball.rank
        self.ball = ball

    def act_letter(self, letter, v):
        col = self.ball.left_table[:, self.ball.letter_index(letter)]
        nz = np.flatnonzero(v)
        if nz.size and (col[nz] < 0).any():
            raise TruncationError(f"letter {letter} pushes support outside {self.ball!r}")
        out = np.zeros_like(v)
        out[col[nz]] = v[nz]
        return out

    def zero(self):
        return np.zeros(len(self.ball), dtype=complex)


class DiagonalRep(Representation):
    """``Z`` acting by ``U = diag(exp(i * angle_j))``."""

    def __init__(self, angles):
        self.rank = 1
        self.angles = np.asarray(angles, dtype=float)
        self._u = np.exp(1j * self.angles)

    def act_letter(self, letter, v):
        return v * (self._u if letter[1] == 1 else self._u.conjugate())

    def zero(self):
        return np.zeros(self.angles.shape, dtype=complex)


@dataclass(frozen=True)
class CocycleSpec:
    rank: int
    generator_values: tuple
    representation: Representation
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.generator_values) != self.rank:
            raise ParameterError(f"need {self.rank} generator values, got {len(self.generator_values)}")
        if self.representation.rank != self.rank:
            raise RankMismatchError("representation rank differs from cocycle rank")

    def letter_value(self, letter: Letter):
        g, e = letter
        v = self.generator_values[g - 1]
        if e == 1:
            return v
        return -self.representation.act_letter((g, -1), v)

    def max_generator_norm(self) -> float:
        return max((self.representation.norm(v) for v in self.generator_values), default=0.0)


def evaluate_cocycle(spec: CocycleSpec, g: ReducedWord):
    if g.rank != spec.rank:
        raise RankMismatchError(f"word rank {g.rank} vs cocycle rank {spec.rank}")
    pi = spec.representation
    v = pi.zero()
    for letter in reversed(g.letters):
        v = spec.letter_value(letter) + pi.act_letter(letter, v)
    return v


def coboundary_spec(v, representation: Representation, name: str = "coboundary") -> CocycleSpec:
    """Cocycle ``b(g) = v - pi(g) v``."""
    vals = tuple(v - representation.act_letter((j, 1), v) for j in range(1, representation.rank + 1))
    return CocycleSpec(representation.rank, vals, representation, name)


def check_cocycle_identity(spec: CocycleSpec, pairs: Iterable[tuple[ReducedWord, ReducedWord]]) -> float:
    """Largest ``||b(gh) - b(g) - pi(g) b(h)||`` over the pairs."""
    pi = spec.representation
    worst = 0.0
    for g, h in pairs:
        lhs = evaluate_cocycle(spec, multiply(g, h))
        rhs = evaluate_cocycle(spec, g) + pi.act(g, evaluate_cocycle(spec, h))
        worst = max(worst, pi.norm(lhs - rhs))
    return worst


@dataclass
class GrowthProfile:
    samples: list[tuple[str, float]]
    window: str = ""
    scale: float | None = None
    overflow: list[str] = field(default_factory=list)

    def __post_init__(self):
        labels = [lab for lab, _ in self.samples]
        if len(set(labels)) != len(labels):
            raise ParameterError("profile labels must be unique")
        if any(not (x >= 0) for _, x in self.samples):
            raise ParameterError("profile norms must be nonnegative")

    @property
    def labels(self) -> list[str]:
        return [lab for lab, _ in self.samples]

    @property
    def norms(self) -> np.ndarray:
        return np.array([x for _, x in self.samples], dtype=float)

    def to_csv(self) -> str:
        return csv_text(["label", "norm"], self.samples)

    @classmethod
    def from_csv_file(cls, path, scale: float | None = None) -> "GrowthProfile":
        rows = read_csv(path)
        return cls([(r["label"], float(r["norm"])) for r in rows], window=str(path), scale=scale)


def growth_profile(spec: CocycleSpec, elements: Sequence[ReducedWord],
                   labels: Sequence[str] | None = None, window: str = "") -> GrowthProfile:
    labels = list(labels) if labels is not None else [str(g) for g in elements]
    samples, overflow = [], []
    for lab, g in zip(labels, elements):
        try:
            samples.append((lab, spec.representation.norm(evaluate_cocycle(spec, g))))
        except TruncationError:
            overflow.append(lab)
    return GrowthProfile(samples, window=window, scale=spec.max_generator_norm(), overflow=overflow)


@dataclass(frozen=True)
class GrowthThresholds:
    """Classifier knobs; ``None`` means derived from the profile scale."""

    bound_threshold: float | None = None
    recurrence_threshold: float | None = None
    trend_threshold: float = 0.0
    bound_factor: float = 10.0


@dataclass(frozen=True)
class GrowthVerdict:
    tag: str
    evidence: dict
    heuristic: bool = True

    def line(self) -> str:
        ev = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.evidence.items())
        return f"{self.tag} heuristic=true {ev}"


def _slope(y: np.ndarray) -> float:
    if y.size < 2:
        return 0.0
    x = np.arange(y.size, dtype=float)
    x -= x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


def classify_growth(profile: GrowthProfile, thresholds: GrowthThresholds | None = None) -> GrowthVerdict:
    """Finite-window diagnostic for bounded / proper / neither growth.

    Statistics are taken over the last half of the window: the slope of the
    suffix minima (a liminf proxy) and of the running maxima.

    Bounded      max <= bound and the running max has stopped growing
    ProperLike   suffix minima keep rising
    NeitherLike  the running max still grows (or exceeds bound) while the tail
                 minimum falls below the recurrence threshold
    """
    t = thresholds or GrowthThresholds()
    y = profile.norms
    if y.size == 0:
        raise ParameterError("empty profile")
    scale = profile.scale
    if not scale:
        pos = y[y > 0]
        scale = float(pos[0]) if pos.size else 1.0
    bound = t.bound_threshold if t.bound_threshold is not None else t.bound_factor * scale
    recur = t.recurrence_threshold if t.recurrence_threshold is not None else bound

    mid = y.size // 2
    suffix_min = np.minimum.accumulate(y[::-1])[::-1]
    running_max = np.maximum.accumulate(y)
    tail_min_slope = _slope(suffix_min[mid:])
    tail_max_slope = _slope(running_max[mid:])
    ymax = float(y.max())
    tail_min = float(y[mid:].min())
    evidence = {
        "n": int(y.size), "min": float(y.min()), "max": ymax, "tail_min": tail_min,
        "suffix_min_slope": tail_min_slope, "running_max_slope": tail_max_slope,
        "bound": float(bound), "recurrence": float(recur),
    }
    if ymax <= bound and tail_max_slope <= t.trend_threshold:
        tag = "Bounded"
    elif tail_min_slope > t.trend_threshold and suffix_min[-1] > suffix_min[mid]:
        tag = "ProperLike"
    elif (tail_max_slope > t.trend_threshold or ymax > bound) and tail_min < recur:
        tag = "NeitherLike"
    else:
        tag = "Inconclusive"
    return GrowthVerdict(tag, evidence)
