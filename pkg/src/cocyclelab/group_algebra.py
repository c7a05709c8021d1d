"""Group algebra of a free group and its left regular representation.

``FiniteFunction`` is a finitely supported complex function on a group; it is
both the carrier for exact regular-representation computations and the base
of ``AlgebraElement`` (the group algebra, product = convolution).
``TruncatedVector`` holds the same data densely over a ``Ball``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import RankMismatchError, TruncationError
from .freegroup import Ball, ReducedWord, invert, multiply, parse_word


def _clean(terms: Iterable[tuple[Hashable, complex]]) -> dict:
    out: dict = {}
    for k, c in terms:
        out[k] = out.get(k, 0j) + complex(c)
    return {k: c for k, c in out.items() if c != 0}


class FiniteFunction:
    """Finitely supported function ``key -> complex``; zero values are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        self.terms = _clean(items)

    def _new(self, terms) -> "FiniteFunction":
        return type(self)(terms)

    def __getitem__(self, key) -> complex:
        return self.terms.get(key, 0j)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def items(self):
        return self.terms.items()

    def support(self) -> set:
        return set(self.terms)

    def __add__(self, other: "FiniteFunction") -> "FiniteFunction":
        return self._new(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> "FiniteFunction":
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "FiniteFunction") -> "FiniteFunction":
        return self + (-other)

    def __mul__(self, scalar) -> "FiniteFunction":
        if isinstance(scalar, FiniteFunction):
            return NotImplemented
        return self._new({k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteFunction) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def norm(self, p: float = 2.0) -> float:
        if not self.terms:
            return 0.0
        vals = np.abs(np.fromiter(self.terms.values(), dtype=complex, count=len(self.terms)))
        if p == 2:
            # sorted summation keeps the result independent of dict order
            return math.sqrt(math.fsum(np.sort(vals) ** 2))
        return math.fsum(np.sort(vals) ** p) ** (1.0 / p)

    def map_keys(self, fn: Callable) -> "FiniteFunction":
        return self._new([(fn(k), c) for k, c in self.terms.items()])

    def __repr__(self) -> str:
        body = " + ".join(f"({c:g})[{k}]" for k, c in self.terms.items())
        return f"{type(self).__name__}({body or '0'})"


class AlgebraElement(FiniteFunction):
    """Element of the group algebra of the free group of the given rank."""

    __slots__ = ("rank",)

    def __init__(self, rank: int, terms: Mapping | Iterable = ()):
        super().__init__(terms)
        for w in self.terms:
            if not isinstance(w, ReducedWord) or w.rank != rank:
                raise RankMismatchError(f"term {w!r} is not a rank-{rank} word")
        self.rank = rank

    def _new(self, terms) -> "AlgebraElement":
        return AlgebraElement(self.rank, terms)

    @classmethod
    def delta(cls, w: ReducedWord, coeff: complex = 1) -> "AlgebraElement":
        return cls(w.rank, {w: coeff})

    @classmethod
    def zero(cls, rank: int) -> "AlgebraElement":
        return cls(rank)

    @classmethod
    def from_words(cls, rank: int, terms: Mapping[str, complex]) -> "AlgebraElement":
        return cls(rank, [(parse_word(s, rank), c) for s, c in terms.items()])

    def __add__(self, other):
        if isinstance(other, AlgebraElement) and other.rank != self.rank:
            raise RankMismatchError(f"rank {self.rank} vs {other.rank}")
        return super().__add__(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and other.rank == self.rank and self.terms == other.terms

    __hash__ = FiniteFunction.__hash__

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def sorted_items(self) -> list[tuple[ReducedWord, complex]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c.real:g}{c.imag:+g}i)*{w}" for w, c in self.sorted_items())

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["word", "re", "im"])
        for w, c in self.sorted_items():
            wr.writerow([w.to_string(), f"{c.real:.17g}", f"{c.imag:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, rank: int) -> "AlgebraElement":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(rank, [(parse_word(r["word"], rank), complex(float(r["re"]), float(r["im"]))) for r in rows])


def convolve(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """``(f * g)(x) = sum_h f(h) g(h^-1 x)``."""
    if f.rank != g.rank:
        raise RankMismatchError(f"rank {f.rank} vs {g.rank}")
    out = []
    for a, ca in f.items():
        for b, cb in g.items():
            out.append((multiply(a, b), ca * cb))
    return AlgebraElement(f.rank, out)


def involution(f: AlgebraElement) -> AlgebraElement:
    """``f*(x) = conj(f(x^-1))``."""
    return AlgebraElement(f.rank, [(invert(w), c.conjugate()) for w, c in f.items()])


@dataclass(frozen=True)
class TruncatedVector:
    ball: Ball
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (len(self.ball),):
            raise ValueError(f"expected {len(self.ball)} coefficients, got shape {self.coeffs.shape}")

    @classmethod
    def zeros(cls, ball: Ball) -> "TruncatedVector":
        return cls(ball, np.zeros(len(ball), dtype=complex))

    @classmethod
    def from_function(cls, f: FiniteFunction, ball: Ball) -> "TruncatedVector":
        v = np.zeros(len(ball), dtype=complex)
        for w, c in f.items():
            if w not in ball:
                raise TruncationError(f"{w} lies outside {ball!r}")
            v[ball.index[w]] = c
        return cls(ball, v)

    def to_function(self) -> AlgebraElement:
        nz = np.flatnonzero(self.coeffs)
        return AlgebraElement(self.ball.rank, [(self.ball.elements[i], self.coeffs[i]) for i in nz])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "TruncatedVector") -> "TruncatedVector":
        if other.ball is not self.ball:
            raise ValueError("vectors live on different balls")
        return TruncatedVector(self.ball, self.coeffs + other.coeffs)

    def __sub__(self, other: "TruncatedVector") -> "TruncatedVector":
        if other.ball is not self.ball:
            raise ValueError("vectors live on different balls")
        return TruncatedVector(self.ball, self.coeffs - other.coeffs)


def truncated_matrix(f: AlgebraElement, in_ball: Ball, out_ball: Ball) -> sp.csr_matrix:
    """Sparse matrix of ``lambda(f)`` from ``in_ball`` coordinates to ``out_ball`` coordinates."""
    if f.rank != in_ball.rank or f.rank != out_ball.rank:
        raise RankMismatchError("algebra element and balls must share a rank")
    rows, cols, vals = [], [], []
    for h, c in f.sorted_items():
        for j, y in enumerate(in_ball.elements):
            hy = multiply(h, y)
            i = out_ball.index.get(hy)
            if i is None:
                raise TruncationError(f"{h}*{y} = {hy} falls outside {out_ball!r}")
            rows.append(i)
            cols.append(j)
            vals.append(c)
    dtype = complex if any(complex(v).imag for v in vals) else float
    data = np.array(vals, dtype=complex)
    if dtype is float:
        data = data.real.copy()
    return sp.csr_matrix((data, (rows, cols)), shape=(len(out_ball), len(in_ball)))


def apply_regular(f: AlgebraElement, v: TruncatedVector, out_ball: Ball) -> TruncatedVector:
    """Exact image ``f * v`` on ``out_ball``; raises rather than clipping."""
    if out_ball.radius < v.ball.radius + f.max_length():
        raise TruncationError(
            f"output radius {out_ball.radius} < {v.ball.radius} + {f.max_length()}")
    m = truncated_matrix(f, v.ball, out_ball)
    return TruncatedVector(out_ball, np.asarray(m @ v.coeffs, dtype=complex))
