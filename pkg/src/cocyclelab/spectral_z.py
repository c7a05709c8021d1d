"""Growth of Z-cocycles through their spectral measures.

For the affine action ``v -> e(x) v + 1`` on ``L^2([0,1), mu)`` with
``e(x) = exp(2 pi i x)`` the squared cocycle norm is

    c(n) = ||b(n)||^2 = integral of phi_n(x) = |sin(pi n x) / sin(pi x)|^2  d mu(x).

Measures come in three flavours: atomic, with a density, and finite-depth
Cantor-type measures.  The Cantor measures are integrated in mpmath because
the margins checked on them are far below double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np
from scipy import integrate

from . import kernels
from .cocycles import GrowthProfile
from .errors import NumericalError, ParameterError
from .io_utils import csv_text

CANTOR_DPS = 80


def phi(n: int, x) -> np.ndarray:
    if n < 1:
        raise ParameterError("n must be >= 1")
    return kernels.phi(n, x)


# -- measures ----------------------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomicMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.shape != wts.shape or pts.ndim != 1:
            raise ParameterError("points and weights must be 1-d arrays of equal length")
        if ((pts < 0) | (pts >= 1)).any():
            raise ParameterError("atoms must lie in [0, 1)")
        if len(np.unique(pts)) != len(pts):
            raise ParameterError("atoms must be distinct")
        if (wts <= 0).any():
            raise ParameterError("weights must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True)
class DensityMeasure:
    """``d mu = density(x) dx`` on [0, 1).

    ``bandwidth`` is the degree of the density as a trigonometric polynomial
    when known; it enables an exact periodic trapezoid rule.
    """

    density: Callable[[np.ndarray], np.ndarray]
    bandwidth: int | None = None
    mass: float = 1.0
    label: str = ""


def lebesgue() -> DensityMeasure:
    return DensityMeasure(lambda x: np.ones_like(np.asarray(x, dtype=float)), bandwidth=0, mass=1.0,
                          label="lebesgue")


def random_atomic(rng: np.random.Generator, max_atoms: int = 16) -> AtomicMeasure:
    count = int(rng.integers(1, max_atoms + 1))
    pts = np.unique(rng.random(count))
    w = rng.random(pts.size) + 0.05
    return AtomicMeasure(pts, w / w.sum())


# -- shift vectors -------------------------------------------------------------------------------------

def _shift_arrays(f: Mapping[int, complex]) -> tuple[int, np.ndarray]:
    f = {int(k): complex(v) for k, v in f.items() if v != 0}
    if not f:
        raise ParameterError("shift vector must be nonzero")
    lo, hi = min(f), max(f)
    arr = np.zeros(hi - lo + 1, dtype=complex)
    for k, v in f.items():
        arr[k - lo] = v
    return lo, arr


def measure_from_shift_vector(f: Mapping[int, complex]) -> DensityMeasure:
    """Spectral density ``|sum_k f_k exp(2 pi i k x)|^2`` of ``f`` under the bilateral shift.

    The measure is not renormalised; its mass is ``||f||^2``.
    """
    lo, arr = _shift_arrays(f)
    ks = np.arange(lo, lo + arr.size)

    def density(x):
        x = np.asarray(x, dtype=float)
        vals = np.exp(2j * np.pi * np.multiply.outer(x, ks)) @ arr
        return np.abs(vals) ** 2

    return DensityMeasure(density, bandwidth=int(arr.size - 1), mass=float(np.sum(np.abs(arr) ** 2)),
                          label="shift")


def shift_orbit_norm_sq(f: Mapping[int, complex], n: int) -> float:
    """``||sum_{j<n} T^j f||^2`` computed directly in ``l^2(Z)``."""
    _, arr = _shift_arrays(f)
    s = np.convolve(arr, np.ones(n))
    return float(np.sum(np.abs(s) ** 2))


# -- c(n) ----------------------------------------------------------------------------------------------

def _density_c(mu: DensityMeasure, n: int, tol: float) -> float:
    if mu.bandwidth is not None:
        m = 2 * (n + mu.bandwidth) + 2
        x = np.arange(m) / m
        return float(np.mean(kernels.phi(n, x) * mu.density(x)))
    total, err = 0.0, 0.0
    edges = np.linspace(0.0, 1.0, n + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(lambda t: float(kernels.phi(n, t)[0] * mu.density(np.array([t]))[0]),
                                a, b, epsabs=tol / n, epsrel=tol, limit=200)
        total += val
        err += e
    if err > tol * max(1.0, abs(total)):
        raise NumericalError(f"quadrature error estimate {err:.3e} exceeds tolerance (value {total:.17g})")
    return total


def cocycle_norm_sq(mu, n: int, tol: float = 1e-10) -> float:
    if n < 1:
        raise ParameterError("n must be >= 1")
    if isinstance(mu, AtomicMeasure):
        return float(kernels.atomic_c(mu.points, mu.weights, [n])[0])
    if isinstance(mu, DensityMeasure):
        return _density_c(mu, n, tol)
    if isinstance(mu, CantorMeasure):
        return float(mu.integrate(lambda x: _phi_mp(n, x)))
    raise TypeError(f"unsupported measure {type(mu).__name__}")


def growth_curve(mu, ns: Sequence[int]) -> np.ndarray:
    ns = np.asarray(ns, dtype=np.int64)
    if isinstance(mu, AtomicMeasure):
        return kernels.atomic_c(mu.points, mu.weights, ns)
    return np.array([cocycle_norm_sq(mu, int(n)) for n in ns])


def atomic_orbit_norm_sq(mu: AtomicMeasure, nmax: int) -> np.ndarray:
    """Independent route to ``c(1..nmax)``: orbit sums for ``U = diag(e(x_j))``, ``b = sqrt(w_j)``."""
    return kernels.orbit_norm_sq(mu.points, np.sqrt(mu.weights), nmax)


def curve_csv(ns, values) -> str:
    return csv_text(["n", "c_n"], zip((int(n) for n in ns), values))


# -- Edelstein's isometry --------------------------------------------------------------------------------

def edelstein_orbit_norm_sq(m, nmax: int = 12):
    """``||r^m(0)||^2 = sum_{n<=nmax} |1 - exp(2 pi i m / n!)|^2``; scalar in, scalar out."""
    arr = kernels.edelstein_norm_sq(np.atleast_1d(np.asarray(m, dtype=np.int64)), nmax)
    return float(arr[0]) if np.ndim(m) == 0 else arr


def edelstein_dip_bound(n: int, nmax: int = 12) -> float:
    """``sum_{n<k<=nmax} (2 pi n!/k!)^2``."""
    total = 0.0
    ratio = 1.0
    for k in range(n + 1, nmax + 1):
        ratio /= k
        total += (2 * math.pi * ratio) ** 2
    return total


def edelstein_almost_fixed(m: int, nmax: int = kernels.MAX_EDELSTEIN_COORDS) -> float:
    """``||r(v_m) - v_m||`` for ``v_m`` the indicator of ``{1..m}``.

    Coordinates ``n <= m`` sit at the centre 1 and do not move; coordinate
    ``n > m`` moves 0 by ``|1 - exp(2 pi i / n!)|``.
    """
    if m < 1:
        raise ParameterError("m must be >= 1")
    terms = [4.0 * math.sin(math.pi / math.factorial(n)) ** 2 for n in range(m + 1, nmax + 1)]
    return math.sqrt(math.fsum(sorted(terms)))


@dataclass(frozen=True)
class EdelsteinState:
    truncation: int
    point: np.ndarray

    @classmethod
    def origin(cls, truncation: int) -> "EdelsteinState":
        return cls(truncation, np.zeros(truncation, dtype=complex))

    def apply(self, times: int = 1) -> "EdelsteinState":
        """``r^times``: coordinate n rotates about 1 by ``2 pi times / n!``."""
        frac = np.array([(times % math.factorial(n)) / math.factorial(n)
                         for n in range(1, self.truncation + 1)])
        rot = np.exp(2j * np.pi * frac)
        return EdelsteinState(self.truncation, 1 + rot * (self.point - 1))

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.point) ** 2))


def edelstein_profile(upto: int, nmax: int = 12) -> GrowthProfile:
    ms = np.arange(1, upto + 1)
    norms = np.sqrt(kernels.edelstein_norm_sq(ms, nmax))
    return GrowthProfile([(str(int(m)), float(v)) for m, v in zip(ms, norms)],
                         window=f"m=1..{upto}, nmax={nmax}", scale=float(norms[0]))


# -- Cantor-type measures ----------------------------------------------------------------------------------

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class CantorParams:
    """``N`` increasing, ``eps`` decreasing in (0,1), ``k`` 1-based level indices for the calibration."""

    N: tuple[int, ...]
    eps: tuple[Fraction, ...]
    k: tuple[int, ...]
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "N", tuple(int(n) for n in self.N))
        object.__setattr__(self, "eps", tuple(_frac(e) for e in self.eps))
        object.__setattr__(self, "k", tuple(int(j) for j in self.k))

    @classmethod
    def power_law(cls, N: Sequence[int], exponent: int = 5, k: Sequence[int] | None = None,
                  depth: int | None = None) -> "CantorParams":
        """``eps_n = N_n^-exponent``."""
        depth = depth or len(N)
        k = tuple(k) if k is not None else tuple(range(1, depth + 1))
        return cls(tuple(N), tuple(Fraction(1, n**exponent) for n in N), k, depth)

    def violations(self) -> list[str]:
        out = []
        if self.depth < 1 or self.depth > len(self.N) or len(self.eps) < self.depth:
            out.append("depth must be between 1 and the number of levels given")
            return out
        N, eps = self.N[: self.depth], self.eps[: self.depth]
        if any(b <= a for a, b in zip(N, N[1:])):
            out.append("N must be strictly increasing")
        if any(not (0 < e < 1) for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            out.append("eps must be strictly decreasing in (0, 1)")
        for i in range(self.depth - 1):
            if Fraction(N[i], N[i + 1]) > eps[i] / 10:
                out.append(f"N_{i+1}/N_{i+2} = {N[i]}/{N[i+1]} exceeds eps_{i+1}/10")
        if not self.k or any(not 1 <= j <= self.depth for j in self.k) or list(self.k) != sorted(set(self.k)):
            out.append("k must be strictly increasing level indices within the depth")
        for j in self.k:
            if 1 <= j <= self.depth and eps[j - 1] > Fraction(1, 10 * N[j - 1] ** 4):
                out.append(f"eps_{j} exceeds N_{j}^-4/10")
        return out

    def check(self) -> None:
        bad = self.violations()
        if bad:
            raise ParameterError("inadmissible Cantor parameters: " + "; ".join(bad))

    def sqrt_eps(self, j: int) -> mpmath.mpf:
        e = self.eps[self.k[j - 1] - 1]
        with mpmath.workdps(CANTOR_DPS):
            return mpmath.sqrt(mpmath.mpf(e.numerator) / e.denominator)


DEFAULT_CANTOR_PARAMS = CantorParams.power_law((16, 16**7), exponent=5, k=(1, 2), depth=2)


def _le_sqrt(x: Fraction, e: Fraction) -> bool:
    """``x <= sqrt(e)`` for ``x >= 0``, exactly."""
    return x * x <= e


def _mp(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class CantorInterval:
    level: int
    lo: Fraction
    hi: Fraction
    weight: mpmath.mpf


@dataclass
class CantorMeasure:
    params: CantorParams
    levels: list[list[CantorInterval]] = field(default_factory=list)

    @property
    def leaves(self) -> list[CantorInterval]:
        return self.levels[-1]

    def mass(self) -> mpmath.mpf:
        with mpmath.workdps(CANTOR_DPS):
            return mpmath.fsum(iv.weight for iv in self.leaves)

    def support_max(self) -> Fraction:
        return max(iv.hi for iv in self.leaves)

    def integrate(self, fn: Callable[[mpmath.mpf], mpmath.mpf], upto: Fraction | None = None,
                  upto_sqrt: Fraction | None = None, resolution: int = 1,
                  skip_origin: bool = False) -> mpmath.mpf:
        """Integral of ``fn`` against the measure, optionally over ``[0, sqrt(upto_sqrt)]``.

        Each leaf carries the uniform distribution; Gauss-Legendre with
        ``ceil(10 * width * resolution) + 4`` nodes and weights normalised to
        sum to one.
        """
        with mpmath.workdps(CANTOR_DPS):
            total = mpmath.mpf(0)
            for iv in self.leaves:
                if upto is not None and iv.hi > upto:
                    continue
                if upto_sqrt is not None and not _le_sqrt(iv.hi, upto_sqrt):
                    continue
                if skip_origin and iv.lo == 0:
                    continue
                m = int(math.ceil(10 * float(iv.hi - iv.lo) * resolution)) + 4
                nodes, wts = np.polynomial.legendre.leggauss(m)
                c, h = _mp((iv.lo + iv.hi) / 2), _mp((iv.hi - iv.lo) / 2)
                wsum = mpmath.fsum(mpmath.mpf(float(w)) for w in wts)
                acc = mpmath.fsum(mpmath.mpf(float(w)) * fn(c + h * mpmath.mpf(float(t)))
                                  for t, w in zip(nodes, wts))
                total += iv.weight * acc / wsum
            return total

    def measure_below_sqrt(self, e: Fraction) -> mpmath.mpf:
        """``mu([0, sqrt(e)])``; leaves never straddle the calibration points."""
        with mpmath.workdps(CANTOR_DPS):
            return mpmath.fsum(iv.weight for iv in self.leaves if _le_sqrt(iv.hi, e))

    def to_csv(self) -> str:
        rows = []
        for lvl in self.levels:
            for iv in lvl:
                rows.append((iv.level, float(iv.lo), float(iv.hi), float(iv.weight)))
        return csv_text(["level", "lo", "hi", "weight"], rows)


def _children(lo: Fraction, hi: Fraction, N: int, eps: Fraction) -> list[tuple[Fraction, Fraction]]:
    out = []
    kmin = math.ceil(lo * N - eps)
    kmax = math.floor(hi * N + eps)
    for k in range(max(kmin, 0), min(kmax, N) + 1):
        a = max(lo, Fraction(k, N) - eps / N, Fraction(0))
        b = min(hi, Fraction(k, N) + eps / N, Fraction(1))
        if a < b:
            out.append((a, b))
    return out


def build_cantor_measure(params: CantorParams = DEFAULT_CANTOR_PARAMS) -> CantorMeasure:
    """Finite-depth measure on ``K_depth`` inside ``[0, 1/2]`` with the calibration.

    Pieces ``[sqrt(eps_{k_1}), 1/2]``, ``[sqrt(eps_{k_{j+1}}), sqrt(eps_{k_j})]`` and
    ``[0, sqrt(eps_{k_last})]`` carry masses ``1 - sqrt(eps_{k_1})``,
    ``sqrt(eps_{k_j}) - sqrt(eps_{k_{j+1}})`` and ``sqrt(eps_{k_last})``, spread
    uniformly over the surviving level-``depth`` intervals, so that
    ``mu([0, sqrt(eps_{k_j})]) = sqrt(eps_{k_j})`` for every j.
    """
    params.check()
    half = Fraction(1, 2)
    tree: list[list[tuple[Fraction, Fraction, int]]] = []
    parents = [(Fraction(0), half)]
    for lvl in range(params.depth):
        kids = []
        for pi, (a, b) in enumerate(parents):
            for c, d in _children(a, b, params.N[lvl], params.eps[lvl]):
                kids.append((c, d, pi))
        if not kids:
            raise ParameterError(f"K meets [0, 1/2] in no interval at level {lvl + 1}")
        tree.append(kids)
        parents = [(c, d) for c, d, _ in kids]

    leaves = tree[-1]
    cuts = [params.eps[j - 1] for j in params.k]  # squared calibration points, decreasing
    piece_of = []
    for lo, hi, _ in leaves:
        # piece 0 is the top piece; piece p lies below sqrt(cuts[p-1])
        p = sum(1 for e in cuts if _le_sqrt(hi, e))
        q = sum(1 for e in cuts if _le_sqrt(lo, e) and lo * lo != e)
        if p != q and not any(lo * lo == e for e in cuts):
            raise ParameterError(f"leaf [{float(lo)}, {float(hi)}] straddles a calibration point; "
                                 "calibration infeasible")
        piece_of.append(p)

    with mpmath.workdps(CANTOR_DPS):
        roots = [params.sqrt_eps(j) for j in range(1, len(params.k) + 1)]
        masses = [1 - roots[0]] + [roots[i] - roots[i + 1] for i in range(len(roots) - 1)] + [roots[-1]]
        lengths = [mpmath.mpf(0)] * len(masses)
        for (lo, hi, _), p in zip(leaves, piece_of):
            lengths[p] += _mp(hi - lo)
        for p, ln in enumerate(lengths):
            if ln == 0:
                raise ParameterError(f"calibration piece {p} contains no part of K; calibration infeasible")
        weights = [masses[p] * _mp(hi - lo) / lengths[p] for (lo, hi, _), p in zip(leaves, piece_of)]

        levels: list[list[CantorInterval]] = [[] for _ in tree]
        levels[-1] = [CantorInterval(params.depth, lo, hi, w) for (lo, hi, _), w in zip(leaves, weights)]
        for lvl in range(params.depth - 2, -1, -1):
            acc = [mpmath.mpf(0)] * len(tree[lvl])
            for (_, _, parent), iv in zip(tree[lvl + 1], levels[lvl + 1]):
                acc[parent] += iv.weight
            levels[lvl] = [CantorInterval(lvl + 1, lo, hi, w) for (lo, hi, _), w in zip(tree[lvl], acc)]
    return CantorMeasure(params, levels)


def _phi_mp(n: int, x: mpmath.mpf) -> mpmath.mpf:
    if x == 0:
        return mpmath.mpf(n) ** 2
    # reduce n*x mod 1 before the sine: x is given to CANTOR_DPS digits
    t = n * x
    t -= mpmath.nint(t)
    return (mpmath.sin(mpmath.pi * t) / mpmath.sin(mpmath.pi * x)) ** 2


@dataclass(frozen=True)
class CalibrationCheck:
    level: int
    target: float
    value: float
    error: float


@dataclass(frozen=True)
class GrowthBoundCheck:
    level: int
    N: int
    c: float
    bound: float
    margin: float
    holds: bool
    alt_bound: float  # (sin(2 pi eps)/sin(2 pi sqrt(eps)))^2 * mu(x >= sqrt eps) + sqrt(eps) N^2


@dataclass(frozen=True)
class SingularIntegralCheck:
    """``integral`` is infinite when the leaf at the origin carries mass (the
    density there is uniform and ``1/sin^2`` is not integrable at 0);
    ``away_from_origin`` drops that leaf and is always finite."""

    level: int
    integral: float
    away_from_origin: float
    lower_bound: float
    exact_integrand: float  # away_from_origin with |1 - e(x)|^-2 = 1/(4 sin^2(pi x))
    holds: bool


def calibration_check(mu: CantorMeasure, level: int) -> CalibrationCheck:
    e = mu.params.eps[mu.params.k[level - 1] - 1]
    with mpmath.workdps(CANTOR_DPS):
        target = mu.params.sqrt_eps(level)
        val = mu.measure_below_sqrt(e)
        return CalibrationCheck(level, float(target), float(val), float(abs(val - target)))


def cantor_growth_bound_check(mu: CantorMeasure, level: int) -> GrowthBoundCheck:
    """``c(N_{k_n}) <= sqrt(eps_{k_n}) N_{k_n}^2 + pi^2 eps_{k_n} / 4``, compared in mpmath."""
    p = mu.params
    if not 1 <= level <= len(p.k):
        raise ParameterError(f"level must be in 1..{len(p.k)}")
    j = p.k[level - 1]
    n_big, e = p.N[j - 1], p.eps[j - 1]
    with mpmath.workdps(CANTOR_DPS):
        c = mu.integrate(lambda x: _phi_mp(n_big, x), resolution=n_big)
        root = p.sqrt_eps(level)
        e_mp = _mp(e)
        bound = root * n_big**2 + mpmath.pi**2 * e_mp / 4
        alt = (mpmath.sin(2 * mpmath.pi * e_mp) / mpmath.sin(2 * mpmath.pi * root)) ** 2 + root * n_big**2
        return GrowthBoundCheck(level, n_big, float(c), float(bound), float(bound - c), bool(c <= bound), float(alt))


def cantor_singular_integral_check(mu: CantorMeasure, level: int) -> SingularIntegralCheck:
    """Partial integral of ``1/sin^2(pi x)`` over ``[0, sqrt(eps_{k_n})]`` against its lower bound."""
    p = mu.params
    e = p.eps[p.k[level - 1] - 1]
    with mpmath.workdps(CANTOR_DPS):
        fn = lambda x: 1 / mpmath.sin(mpmath.pi * x) ** 2  # noqa: E731
        away = mu.integrate(fn, upto_sqrt=e, skip_origin=True)
        origin_mass = sum(iv.weight for iv in mu.leaves if iv.lo == 0)
        val = mpmath.inf if origin_mass > 0 else away
        lower = 1 / (mpmath.pi**2 * p.sqrt_eps(level))
        return SingularIntegralCheck(level, float(val), float(away), float(lower), float(away / 4), bool(val >= lower))
