"""Fox-type coefficients of a word and the identity they satisfy.

For a reduced word ``w = x_1^e_1 ... x_n^e_n`` and a generator ``s`` the
coefficient is

    f_{w,s} = sum_{j : x_j = s} e_j * x_1^e_1 ... x_{j-1}^e_{j-1} * x_j^d_j,   d_j = (e_j - 1)/2

so that every cocycle ``b`` satisfies ``b(w) = sum_s pi(f_{w,s}) b(s)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..cocycles import CocycleSpec, evaluate_cocycle
from ..errors import ParameterError, RankMismatchError
from ..freegroup import ReducedWord
from ..group_algebra import AlgebraElement


def fox_derivatives(w: ReducedWord) -> tuple[AlgebraElement, ...]:
    """One coefficient per generator of ``w.rank``."""
    terms: list[list] = [[] for _ in range(w.rank)]
    prefix: tuple = ()
    for g, e in w.letters:
        key = prefix if e == 1 else prefix + ((g, -1),)
        terms[g - 1].append((ReducedWord(w.rank, key), e))
        prefix = prefix + ((g, e),)
    return tuple(AlgebraElement(w.rank, t) for t in terms)


@dataclass(frozen=True)
class FoxPair:
    word: ReducedWord
    f_s: AlgebraElement
    f_t: AlgebraElement

    @property
    def total_terms(self) -> int:
        return len(self.f_s) + len(self.f_t)


def fox_elements(w: ReducedWord) -> FoxPair:
    if w.rank != 2:
        raise RankMismatchError("fox_elements works over F_2; use fox_derivatives for other ranks")
    f_s, f_t = fox_derivatives(w)
    return FoxPair(w, f_s, f_t)


def fox_residual(w: ReducedWord, spec: CocycleSpec) -> float:
    """``||b(w) - sum_s pi(f_{w,s}) b(s)||`` for any rank."""
    if spec.rank != w.rank:
        raise RankMismatchError(f"word rank {w.rank} vs cocycle rank {spec.rank}")
    pi = spec.representation
    rhs = pi.zero()
    for f, v in zip(fox_derivatives(w), spec.generator_values):
        rhs = rhs + pi.act_algebra(f, v)
    return pi.norm(evaluate_cocycle(spec, w) - rhs)


def verify_fox_identity(pair: FoxPair, spec: CocycleSpec) -> float:
    if spec.rank != 2:
        raise ParameterError("verify_fox_identity expects a cocycle on F_2")
    pi = spec.representation
    b_s, b_t = spec.generator_values
    diff = evaluate_cocycle(spec, pair.word) - pi.act_algebra(pair.f_s, b_s) - pi.act_algebra(pair.f_t, b_t)
    return pi.norm(diff)
