"""Spaces with measured walls, the tree cocycle, and the discrete gradient bound.

A wall is stored as one designated class of points plus a weight.  Each wall
gives two half-spaces, each carrying measure ``weight / 2``.  The cocycle
``c(x, y) = chi_x - chi_y`` lives on half-spaces; both half-spaces of a
separating wall contribute, so ``||c(x, y)||_p^p`` is the wall distance for
every ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .cocycles import GrowthProfile
from .errors import NumericalError, ParameterError, TruncationError
from .freegroup import Ball, ReducedWord, enumerate_ball

HalfSpace = tuple[int, int]  # (wall index, 0 for the designated class, 1 for its complement)


@dataclass(frozen=True)
class Wall:
    weight: Fraction
    side: frozenset


@dataclass
class WallSpace:
    points: tuple[str, ...]
    walls: list[Wall]
    generators: dict[str, dict[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        self.points = tuple(self.points)
        pts = frozenset(self.points)
        if len(pts) != len(self.points):
            raise ParameterError("duplicate point ids")
        for i, w in enumerate(self.walls):
            if not w.weight > 0:
                raise ParameterError(f"wall {i} has nonpositive weight")
            if not w.side or not w.side < pts:
                raise ParameterError(f"wall {i} does not split the points into two nonempty classes")
        self._by_partition = {}
        for i, w in enumerate(self.walls):
            key = frozenset((w.side, pts - w.side))
            if key in self._by_partition:
                raise ParameterError(f"wall {i} repeats wall {self._by_partition[key]}")
            self._by_partition[key] = i
        for name, perm in self.generators.items():
            if set(perm) != pts or set(perm.values()) != pts:
                raise ParameterError(f"generator {name} is not a permutation of the points")
            for i in range(len(self.walls)):
                j, _ = self._image_halfspace(name, (i, 0))
                if self.walls[j].weight != self.walls[i].weight:
                    raise ParameterError(f"generator {name} does not preserve the weight of wall {i}")

    def _check_point(self, x: str) -> None:
        if x not in self.points:
            raise ParameterError(f"unknown point {x!r}")

    def halfspace_points(self, h: HalfSpace) -> frozenset:
        i, s = h
        side = self.walls[i].side
        return side if s == 0 else frozenset(self.points) - side

    def _image_halfspace(self, gen: str, h: HalfSpace) -> HalfSpace:
        perm = self.generators[gen]
        image = frozenset(perm[x] for x in self.halfspace_points(h))
        key = frozenset((image, frozenset(self.points) - image))
        j = self._by_partition.get(key)
        if j is None:
            raise ParameterError(f"generator {gen} does not map walls to walls")
        return (j, 0 if image == self.walls[j].side else 1)

    def act(self, gen: str, x: str) -> str:
        return self.generators[gen][x]

    def separating(self, x: str, y: str) -> list[int]:
        self._check_point(x)
        self._check_point(y)
        return [i for i, w in enumerate(self.walls) if (x in w.side) != (y in w.side)]

    def measure(self, h: HalfSpace) -> Fraction:
        return self.walls[h[0]].weight / 2

    # -- text format ------------------------------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "WallSpace":
        points, walls, gens = [], [], {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0]
            try:
                if kind == "point" and len(parts) == 2:
                    points.append(parts[1])
                elif kind == "wall" and len(parts) == 3:
                    walls.append(Wall(Fraction(parts[1]), frozenset(parts[2].split(","))))
                elif kind == "gen" and len(parts) == 3:
                    images = parts[2].split(",")
                    if len(images) != len(points):
                        raise ParameterError("permutation length differs from the number of points")
                    gens[parts[1]] = dict(zip(points, images))
                else:
                    raise ParameterError(f"cannot parse {line!r}")
            except (ValueError, ZeroDivisionError) as exc:
                raise ParameterError(f"line {lineno}: {exc}") from None
        return cls(tuple(points), walls, gens)

    @classmethod
    def load(cls, path) -> "WallSpace":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = [f"point {p}" for p in self.points]
        for w in self.walls:
            lines.append(f"wall {w.weight} {','.join(p for p in self.points if p in w.side)}")
        for name, perm in self.generators.items():
            lines.append(f"gen {name} {','.join(perm[p] for p in self.points)}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HalfSpaceVector:
    values: Mapping[HalfSpace, int]

    def norm_p(self, ws: WallSpace, p: float) -> Fraction | float:
        """``sum nu(h) |v(h)|^p``; exact when all entries are +-1 or 0."""
        if p < 1:
            raise ParameterError("p must be >= 1")
        if all(abs(v) == 1 for v in self.values.values()):
            return sum((ws.measure(h) for h in self.values), Fraction(0))
        return float(sum(float(ws.measure(h)) * abs(v) ** p for h, v in self.values.items()))

    def __add__(self, other: "HalfSpaceVector") -> "HalfSpaceVector":
        out = dict(self.values)
        for h, v in other.values.items():
            out[h] = out.get(h, 0) + v
            if out[h] == 0:
                del out[h]
        return HalfSpaceVector(out)

    def push(self, ws: WallSpace, gen: str) -> "HalfSpaceVector":
        """``(pi(g) v)(g h) = v(h)``."""
        return HalfSpaceVector({ws._image_halfspace(gen, h): v for h, v in self.values.items()})


def wall_cocycle(ws: WallSpace, x: str, y: str) -> HalfSpaceVector:
    vals: dict[HalfSpace, int] = {}
    for i in ws.separating(x, y):
        sx = 0 if x in ws.walls[i].side else 1
        vals[(i, sx)] = 1
        vals[(i, 1 - sx)] = -1
    return HalfSpaceVector(vals)


def wall_distance(ws: WallSpace, x: str, y: str) -> Fraction:
    return sum((ws.walls[i].weight for i in ws.separating(x, y)), Fraction(0))


def wall_norm(ws: WallSpace, x: str, y: str, p: float = 2.0) -> Fraction | float:
    """``||c(x, y)||_p^p``."""
    return wall_cocycle(ws, x, y).norm_p(ws, p)


def check_chasles(ws: WallSpace) -> bool:
    for x, y, z in product(ws.points, repeat=3):
        if wall_cocycle(ws, x, y) + wall_cocycle(ws, y, z) != wall_cocycle(ws, x, z):
            return False
    return True


def check_equivariance(ws: WallSpace) -> bool:
    """``c(gx, gy) = pi(g) c(x, y)`` for every generator and point pair."""
    for gen in ws.generators:
        for x, y in product(ws.points, repeat=2):
            lhs = wall_cocycle(ws, ws.act(gen, x), ws.act(gen, y))
            if lhs != wall_cocycle(ws, x, y).push(ws, gen):
                return False
    return True


def cycle_wall_space(m: int) -> WallSpace:
    """Cycle of even length ``m`` cut by its ``m/2`` diameters, with rotation and reflection."""
    if m < 2 or m % 2:
        raise ParameterError("m must be even and >= 2")
    pts = tuple(str(i) for i in range(m))
    walls = [Wall(Fraction(1), frozenset(str((j + i) % m) for i in range(m // 2))) for j in range(m // 2)]
    gens = {
        "r": {str(i): str((i + 1) % m) for i in range(m)},
        "f": {str(i): str((-i) % m) for i in range(m)},
    }
    return WallSpace(pts, walls, gens)


def hypercube_wall_space(weights: Sequence) -> WallSpace:
    """``{0,1}^d`` with wall i splitting on bit i; generator ``x<i>`` flips bit i."""
    d = len(weights)
    pts = tuple("".join(bits) for bits in product("01", repeat=d))
    walls = [Wall(Fraction(w), frozenset(p for p in pts if p[i] == "0")) for i, w in enumerate(weights)]
    gens = {}
    for i in range(d):
        gens[f"x{i}"] = {p: p[:i] + ("1" if p[i] == "0" else "0") + p[i + 1:] for p in pts}
    return WallSpace(pts, walls, gens)


# -- Cayley tree of F_k --------------------------------------------------------------------------

class TreeBall:
    """Ball of the Cayley tree with prefix tables.

    ``anc[x, d]`` is the id of the length-``d`` prefix of vertex ``x`` (-1 past
    its length).  Geometric edge ``i`` joins the parent of ``edge_child[i]`` to
    it; its two orientations are the two half-spaces it bounds.
    """

    def __init__(self, rank: int, radius: int):
        self.ball: Ball = enumerate_ball(rank, radius)
        n = len(self.ball)
        anc = np.full((n, radius + 1), -1, dtype=np.int64)
        for i, w in enumerate(self.ball.elements):
            for d in range(len(w) + 1):
                anc[i, d] = self.ball.index[ReducedWord(rank, w.letters[:d])]
        self.anc = anc
        self.edge_child = np.arange(1, n, dtype=np.int64)
        self.edge_depth = self.ball.lengths[1:].copy()

    @property
    def rank(self) -> int:
        return self.ball.rank

    @property
    def radius(self) -> int:
        return self.ball.radius

    def oriented_edges(self) -> list[tuple[int, int]]:
        """``(parent, child)`` and ``(child, parent)`` for every geometric edge."""
        out = []
        for c, d in zip(self.edge_child, self.edge_depth):
            par = int(self.anc[c, d - 1])
            out += [(par, int(c)), (int(c), par)]
        return out

    def is_tree(self) -> bool:
        return len(self.edge_child) == len(self.ball) - 1 and bool((self.anc[:, 0] == 0).all())


@dataclass(frozen=True)
class TreeGrowth:
    elements: tuple[ReducedWord, ...]
    pnorm_p: tuple[Fraction, ...]  # ||b(g)||_p^p, exact
    p: float

    def profile(self) -> GrowthProfile:
        return GrowthProfile([(str(g), float(v) ** (1 / self.p)) for g, v in zip(self.elements, self.pnorm_p)],
                             window=f"p={self.p}", scale=1.0)


def tree_cocycle_growth(k: int, radius: int, p: float = 2.0,
                        elements: Sequence[ReducedWord] | None = None) -> TreeGrowth:
    """``||chi_{g x0} - chi_{x0}||_p^p`` over oriented edges, each of measure 1/2."""
    if p < 1:
        raise ParameterError("p must be >= 1")
    tb = TreeBall(k, radius)
    elements = tuple(elements) if elements is not None else tb.ball.elements
    sums = kernels.tree_halfspace_sums(tb.anc, tb.edge_child, tb.edge_depth, p)
    vals = []
    for g in elements:
        if g not in tb.ball:
            raise TruncationError(f"{g} lies outside the ball of radius {radius}")
        vals.append(Fraction(int(round(sums[tb.ball.index[g]])), 2))
    return TreeGrowth(elements, tuple(vals), p)


# -- gradient inequality --------------------------------------------------------------------------

def gradient_cocycle(k: int, f, g: ReducedWord, p: float = 2.0, ball: Ball | None = None,
                     rtol: float = 1e-12) -> tuple[float, float]:
    """``(||f - rho(g) f||_p, |g| * ||grad f||_p)`` with ``(rho(g) f)(x) = f(x g)``.

    ``f`` is an array over ``ball`` or a mapping word -> value.  The gradient
    runs over geometric edges ``{x, x s}``.  Raises if the inequality fails.
    """
    if p < 1:
        raise ParameterError("p must be >= 1")
    if g.rank != k:
        raise ParameterError("g must be a word in the same free group")
    if isinstance(f, Mapping):
        reach = max((len(w) for w, v in f.items() if v != 0), default=0)
        ball = ball or enumerate_ball(k, reach + max(len(g), 1))
        arr = np.zeros(len(ball))
        for w, v in f.items():
            if w not in ball:
                raise ParameterError(f"{w} lies outside the ball")
            arr[ball.index[w]] = v
    else:
        if ball is None:
            raise ParameterError("an array f needs its ball")
        arr = np.asarray(f, dtype=float)
        if arr.shape != (len(ball),):
            raise ParameterError("f does not match the ball")
    support = np.flatnonzero(arr)
    margin = max(len(g), 1)
    if support.size and ball.lengths[support].max() > ball.radius - margin:
        raise ParameterError(f"support of f must stay within radius {ball.radius - margin}")

    shifted = np.zeros_like(arr)
    for i, w in enumerate(ball.elements):
        j = ball.index.get(w * g)
        if j is not None:
            shifted[i] = arr[j]
    lhs = float(np.sum(np.abs(arr - shifted) ** p) ** (1 / p))

    grad = 0.0
    rt = ball.right_table
    for gen in range(1, k + 1):
        col = rt[:, ball.letter_index((gen, 1))]
        ok = col >= 0
        grad += float(np.sum(np.abs(arr[ok] - arr[col[ok]]) ** p))
    rhs = len(g) * grad ** (1 / p)
    if lhs > rhs * (1 + rtol) + rtol:
        raise NumericalError(f"gradient inequality fails: {lhs!r} > {rhs!r}")
    return lhs, rhs
