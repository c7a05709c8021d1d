"""Amalgamated products and the cocycles built on them.

Groups are described only through ``left_mul(letter, element)`` plus a word
for each element, which is all ``GroupLeftRegular`` needs.  Two families:

* ``FreeProductZC2``: ``Z * C_2 = <h, k | k^2>``, elements are alternating
  syllables (nonzero ints for powers of ``h``, 0 for ``k``).
* ``AmalgamOverZ``: ``F_a *_Z F_b`` identifying cyclically reduced words
  ``z_A`` and ``z_B``; normal form ``r_1 ... r_j z^n`` with ``r_i`` canonical
  left-coset representatives of ``<z>`` taken alternately from the factors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, NamedTuple, Sequence

from ..cocycles import CocycleSpec, GroupLeftRegular, evaluate_cocycle, free_group_regular
from ..errors import ParameterError
from ..freegroup import Letter, ReducedWord, enumerate_ball, multiply, parse_word, reduce
from ..group_algebra import AlgebraElement, FiniteFunction


class FreeProductZC2:
    """``Z * C_2`` with generator 1 = ``h`` (infinite order) and 2 = ``k`` (order 2)."""

    rank = 2
    names = "hk"
    identity: tuple = ()

    @staticmethod
    def left_mul(letter: Letter, elem: tuple) -> tuple:
        g, e = letter
        if g == 1:
            if elem and elem[0] != 0:
                n = elem[0] + e
                return elem[1:] if n == 0 else (n,) + elem[1:]
            return (e,) + elem
        if g == 2:
            return elem[1:] if elem and elem[0] == 0 else (0,) + elem
        raise ParameterError(f"Z*C2 has no generator {g}")

    def multiply(self, a: tuple, b: tuple) -> tuple:
        for letter in reversed(self.to_word(a).letters):
            b = self.left_mul(letter, b)
        return b

    @staticmethod
    def to_word(elem: tuple) -> ReducedWord:
        letters: list[Letter] = []
        for syl in elem:
            if syl == 0:
                letters.append((2, 1))
            else:
                letters.extend([(1, 1 if syl > 0 else -1)] * abs(syl))
        return ReducedWord(2, tuple(letters))

    def from_word(self, w: ReducedWord) -> tuple:
        elem = self.identity
        for letter in reversed(w.letters):
            elem = self.left_mul(letter, elem)
        return elem

    @staticmethod
    def length(elem: tuple) -> int:
        return sum(1 if s == 0 else abs(s) for s in elem)

    def to_string(self, elem: tuple) -> str:
        return self.to_word(elem).to_string(self.names)

    def power_of_h(self, n: int) -> tuple:
        return () if n == 0 else (n,)

    def ball(self, radius: int) -> list[tuple]:
        """Elements of word length <= radius, breadth-first, deterministic."""
        seen = {self.identity}
        layer = [self.identity]
        out = [self.identity]
        gens = [(1, -1), (1, 1), (2, 1)]
        for _ in range(radius):
            nxt = []
            for x in layer:
                for a in gens:
                    y = self.left_mul(a, x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            out.extend(nxt)
            layer = nxt
        return out


def _cyclically_reduced(w: ReducedWord) -> bool:
    if len(w) < 2:
        return True
    (g, e), (h, f) = w.letters[0], w.letters[-1]
    return not (g == h and e == -f)


class AmalgamElement(NamedTuple):
    reps: tuple  # ((factor, ReducedWord), ...), alternating factors, no identities
    power: int   # exponent of the amalgamated generator, on the right


class AmalgamOverZ:
    """``F_a *_Z F_b`` with ``z_a`` in the first factor identified with ``z_b`` in the second.

    Generators ``1..a`` belong to the first factor, ``a+1..a+b`` to the second.
    """

    def __init__(self, rank_a: int, rank_b: int, z_a: ReducedWord, z_b: ReducedWord):
        if z_a.rank != rank_a or z_b.rank != rank_b:
            raise ParameterError("amalgamated words must live in their factors")
        for z in (z_a, z_b):
            if z.is_identity or not _cyclically_reduced(z):
                raise ParameterError(f"amalgamated word {z} must be nontrivial and cyclically reduced")
        self.rank_a, self.rank_b = rank_a, rank_b
        self.rank = rank_a + rank_b
        self.z = (z_a, z_b)
        self.identity = AmalgamElement((), 0)
        self._decompose = lru_cache(maxsize=None)(self._decompose_uncached)

    def _zpow(self, factor: int, p: int) -> ReducedWord:
        return self.z[factor] ** p

    def _decompose_uncached(self, factor: int, x: ReducedWord) -> tuple[ReducedWord, int]:
        """``x = r * z^p`` with ``r`` the shortest, then lexicographically least, coset element."""
        z = self.z[factor]
        span = 2 * len(x) // len(z) + 1
        best = None
        for q in range(-span, span + 1):
            r = multiply(x, z ** (-q))
            key = (len(r), r.letters)
            if best is None or key < best[0]:
                best = (key, r, q)
        return best[1], best[2]

    def _split(self, g: int) -> tuple[int, Letter]:
        if 1 <= g <= self.rank_a:
            return 0, (g, 1)
        if self.rank_a < g <= self.rank:
            return 1, (g - self.rank_a, 1)
        raise ParameterError(f"generator {g} outside 1..{self.rank}")

    def left_mul(self, letter: Letter, elem: AmalgamElement) -> AmalgamElement:
        g, e = letter
        factor, (lg, _) = self._split(g)
        a = ReducedWord(self.rank_b if factor else self.rank_a, ((lg, e),))
        reps = elem.reps
        if reps and reps[0][0] == factor:
            x, rest = multiply(a, reps[0][1]), reps[1:]
        else:
            x, rest = a, reps
        r, p = self._decompose(factor, x)
        out = [] if r.is_identity else [(factor, r)]
        for f_i, r_i in rest:
            y = multiply(self._zpow(f_i, p), r_i) if p else r_i
            r_new, p = self._decompose(f_i, y) if p else (r_i, 0)
            out.append((f_i, r_new))
        return AmalgamElement(tuple(out), elem.power + p)

    def from_word(self, w: ReducedWord) -> AmalgamElement:
        elem = self.identity
        for letter in reversed(w.letters):
            elem = self.left_mul(letter, elem)
        return elem

    def embed(self, factor: int, w: ReducedWord) -> AmalgamElement:
        offset = self.rank_a if factor else 0
        return self.from_word(ReducedWord(self.rank, tuple((g + offset, e) for g, e in w.letters)))

    def lift(self, factor: int, w: ReducedWord) -> ReducedWord:
        offset = self.rank_a if factor else 0
        return ReducedWord(self.rank, tuple((g + offset, e) for g, e in w.letters))

    def to_word(self, elem: AmalgamElement) -> ReducedWord:
        letters: list[Letter] = []
        for f, r in elem.reps:
            letters.extend(self.lift(f, r).letters)
        letters.extend(self.lift(0, self.z[0] ** elem.power).letters)
        return reduce(letters, self.rank)

    def to_string(self, elem: AmalgamElement) -> str:
        return self.to_word(elem).to_string()


# -- amalgam cocycle --------------------------------------------------------------------------------

@dataclass
class AmalgamSpec:
    """Data for the action ``alpha(k) = lambda(k)``, ``alpha(h) = t_w lambda(h) t_-w``.

    ``h_generators`` / ``k_generators`` are generator indices of the factors
    H and K; ``f_elements`` lists the finite common subgroup F; ``w`` is a
    finitely supported function on the group.
    """

    rank: int
    left_mul: Callable[[Letter, Any], Any]
    h_generators: Sequence[int]
    k_generators: Sequence[int]
    f_elements: Sequence[ReducedWord]
    w: FiniteFunction
    description: str = ""
    element_word: Callable[[Any], ReducedWord] | None = None
    zero_factory: Callable[[], FiniteFunction] = field(default=FiniteFunction)

    def representation(self) -> GroupLeftRegular:
        return GroupLeftRegular(self.rank, self.left_mul, self.zero_factory)


def z_star_c2_spec(w: FiniteFunction | None = None) -> AmalgamSpec:
    """``G = Z * C_2`` (H = Z, K = C_2, F = 1), default ``w = delta_e``."""
    grp = FreeProductZC2()
    w = w if w is not None else FiniteFunction({grp.identity: 1})
    return AmalgamSpec(2, grp.left_mul, [1], [2], [], w, "Z*C2, H=<h>, K=<k>, F=1",
                       element_word=grp.to_word)


def single_generator_spec(w_word: ReducedWord) -> AmalgamSpec:
    """``F_2 = Z * Z`` with K the factor containing the single generator of ``w_word``."""
    used = w_word.generators_used()
    if w_word.rank != 2 or len(used) != 1:
        raise ParameterError("need a nontrivial F_2 word in exactly one generator")
    (kgen,) = used
    hgen = 3 - kgen
    rep = free_group_regular(2)
    return AmalgamSpec(2, rep._left_mul, [hgen], [kgen], [],
                       AlgebraElement.delta(ReducedWord.identity(2)),
                       f"F2 = <{'st'[hgen - 1]}> * <{'st'[kgen - 1]}>",
                       element_word=lambda x: x, zero_factory=lambda: AlgebraElement.zero(2))


def build_amalgam_cocycle(spec: AmalgamSpec, radius: int | None = None) -> CocycleSpec:
    """Cocycle ``b(h) = w - lambda(h) w`` on H generators and ``b(k) = 0`` on K generators."""
    rep = spec.representation()
    for f in spec.f_elements:
        if rep.act(f, spec.w) != spec.w:
            raise ParameterError(f"w is not left-invariant under F element {f}")
    if all(rep.act_letter((k, 1), spec.w) == spec.w for k in spec.k_generators):
        raise ParameterError("w is left-K-invariant; the action would have a fixed point")
    values = []
    for g in range(1, spec.rank + 1):
        if g in spec.h_generators:
            values.append(spec.w - rep.act_letter((g, 1), spec.w))
        elif g in spec.k_generators:
            values.append(rep.zero())
        else:
            raise ParameterError(f"generator {g} is in neither factor")
    cocycle = CocycleSpec(spec.rank, tuple(values), rep, name=f"amalgam[{spec.description}]",
                          meta={"w": spec.w})
    if radius is not None and spec.element_word is not None:
        elems = [spec.element_word(x) for x in _ball_elements(spec, radius)]
        resid = max((rep.norm(evaluate_cocycle(cocycle, g) + rep.act(g, spec.w) - spec.w)
                     for g in elems if g.generators_used() <= set(spec.h_generators)), default=0.0)
        cocycle.meta["h_fixed_residual"] = resid
    return cocycle


def _ball_elements(spec: AmalgamSpec, radius: int):
    if spec.left_mul is FreeProductZC2.left_mul:
        return FreeProductZC2().ball(radius)
    return list(enumerate_ball(spec.rank, radius).elements)


def vanishing_cocycle_single_generator(w: ReducedWord) -> CocycleSpec:
    """Cocycle on ``F_2`` with ``b(w) = 0`` exactly when ``w`` uses one generator."""
    return build_amalgam_cocycle(single_generator_spec(w))


# -- gluing over Z ----------------------------------------------------------------------------------

def glue_amalgam_cocycle(base: CocycleSpec, w: ReducedWord, g_word: ReducedWord,
                         tolerance: float = 1e-6) -> CocycleSpec:
    """Extend ``base`` (on ``F_k``, with ``b(w) ~ 0``) to ``F_k *_Z G``, ``G = F_m``, ``w = g_word``.

    On ``F_k`` the glued cocycle is ``base`` placed in the block of functions
    supported on the subgroup ``F_k``; on ``G`` it is zero.  Carriers are exact
    finitely supported functions, so no truncation radius is involved.
    """
    if base.rank != w.rank:
        raise ParameterError("w must be a word of the base group")
    residual = base.representation.norm(evaluate_cocycle(base, w))
    if residual > tolerance:
        raise ParameterError(f"base cocycle has ||b(w)|| = {residual:.3e} > tolerance {tolerance:.1e}")
    group = AmalgamOverZ(base.rank, g_word.rank, w, g_word)
    embed = lru_cache(maxsize=None)(lambda x: group.embed(0, x))
    values = [FiniteFunction([(embed(x), c) for x, c in v.items()]) for v in base.generator_values]
    values += [FiniteFunction() for _ in range(g_word.rank)]
    rep = GroupLeftRegular(group.rank, group.left_mul)
    return CocycleSpec(group.rank, tuple(values), rep, name=f"glued[{w}={g_word}]",
                       meta={"group": group, "base_residual": residual, "embed": embed})


def replace_occurrences(word: ReducedWord, old: ReducedWord, new: ReducedWord) -> tuple[ReducedWord, int]:
    """Replace non-overlapping occurrences of ``old`` in ``word`` (letters, left to right)."""
    src, pat, out, count, i = word.letters, old.letters, [], 0, 0
    while i < len(src):
        if pat and src[i:i + len(pat)] == pat:
            out.extend(new.letters)
            count += 1
            i += len(pat)
        else:
            out.append(src[i])
            i += 1
    return reduce(out, word.rank), count


@dataclass(frozen=True)
class SurfaceGroupData:
    """``Gamma_g = F_2 *_Z F_{2g-2}`` with ``[a_1,b_1]^-1`` identified with ``prod_{j>=2} [a_j,b_j]``."""

    genus: int
    w: ReducedWord
    v: ReducedWord
    names_a: tuple[str, ...]
    names_b: tuple[str, ...]

    @property
    def factor_ranks(self) -> tuple[int, int]:
        return self.w.rank, self.v.rank

    def group(self) -> AmalgamOverZ:
        return AmalgamOverZ(self.w.rank, self.v.rank, self.w, self.v)

    def relator_word(self) -> ReducedWord:
        """``[a_1,b_1] * prod_{j>=2} [a_j,b_j]`` as a word in all 2g generators."""
        grp = self.group()
        return reduce(grp.lift(0, self.w.inverse()).letters + grp.lift(1, self.v).letters, grp.rank)


def _commutator(rank: int, a: int, b: int) -> ReducedWord:
    return reduce([(a, 1), (b, 1), (a, -1), (b, -1)], rank)


def surface_group_data(genus: int) -> SurfaceGroupData:
    if genus < 2:
        raise ParameterError("genus must be >= 2")
    w = _commutator(2, 1, 2).inverse()
    rank_b = 2 * genus - 2
    v = ReducedWord.identity(rank_b)
    for j in range(genus - 1):
        v = v * _commutator(rank_b, 2 * j + 1, 2 * j + 2)
    names_b = tuple(f"{c}{j}" for j in range(2, genus + 1) for c in "ab")
    return SurfaceGroupData(genus, w, v, ("a1", "b1"), names_b)


# -- restriction to a finite-index F_k in F_2 -------------------------------------------------------

class SchreierSubgroup:
    """Kernel of ``F_2 -> Z/(k-1)``, ``s -> 1``, ``t -> 0``: free of rank ``k``, index ``k-1``.

    Free generators: ``y_1 = s^(k-1)`` and ``y_{i+2} = s^i t s^-i`` for ``0 <= i < k-1``.
    Coset representatives ``s^i`` of the right cosets ``H s^i``.
    """

    def __init__(self, k: int):
        if k < 2:
            raise ParameterError("k must be >= 2")
        self.k = k
        self.index = k - 1

    def generator_words(self) -> list[ReducedWord]:
        s = parse_word("s", 2)
        t = parse_word("t", 2)
        gens = [s ** self.index]
        gens += [s ** i * t * s ** (-i) for i in range(self.index)]
        return gens

    def coset(self, x: ReducedWord) -> int:
        return sum(e for g, e in x.letters if g == 1) % self.index

    def rewrite(self, x: ReducedWord) -> ReducedWord:
        """Word in ``F_k`` for ``x`` in H (Reidemeister-Schreier rewriting)."""
        if self.coset(x):
            raise ParameterError(f"{x} is not in the subgroup")
        m = self.index
        letters: list[Letter] = []
        i = 0
        for g, e in x.letters:
            if g == 2:
                letters.append((i + 2, e))
            elif e == 1:
                if i == m - 1:
                    letters.append((1, 1))
                i = (i + 1) % m
            else:
                if i == 0:
                    letters.append((1, -1))
                i = (i - 1) % m
        return reduce(letters, self.k)

    def to_f2(self, y: ReducedWord) -> ReducedWord:
        gens = self.generator_words()
        out = ReducedWord.identity(2)
        for g, e in y.letters:
            out = out * (gens[g - 1] if e == 1 else gens[g - 1].inverse())
        return out


def project_to_subgroup(base: CocycleSpec, k: int) -> list[CocycleSpec]:
    """Split ``base`` (on ``F_2``, regular carriers) into ``k-1`` cocycles on ``F_k``.

    Block ``i`` keeps the values on the coset ``H s^i``, read through
    ``h s^i -> h``.  Each block is a cocycle for ``lambda_{F_k}``.
    """
    sub = SchreierSubgroup(k)
    s = parse_word("s", 2)
    rep_k = free_group_regular(k)
    gen_vals = [evaluate_cocycle(base, y) for y in sub.generator_words()]
    out = []
    for i in range(sub.index):
        back = s ** (-i)
        vals = []
        for v in gen_vals:
            terms = [(sub.rewrite(multiply(x, back)), c) for x, c in v.items() if sub.coset(x) == i]
            vals.append(AlgebraElement(k, terms))
        out.append(CocycleSpec(k, tuple(vals), rep_k, name=f"{base.name}|F_{k}[{i}]",
                               meta={"subgroup": sub, "block": i}))
    return out
