"""Numeric inner loops, each in a numba and a pure-numpy flavour.

The public names dispatch on ``_jit.USE_NUMBA``; the ``*_numba`` / ``*_numpy``
variants stay importable so tests and ``benchmarks/`` can compare them.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np

from . import _jit
from ._jit import njit

# exact integer factorials for Edelstein coordinates 1..20; larger n use floats
FACT_INT = np.array([math.factorial(n) for n in range(1, 21)], dtype=np.int64)
FACT_FLOAT = np.array([float(math.factorial(n)) for n in range(1, 171)], dtype=np.float64)
MAX_EDELSTEIN_COORDS = 170


# -- Fejer-type kernel  phi_n(x) = |sin(pi n x) / sin(pi x)|^2 ---------------------------

# n*x mod 1 is taken with x split as hi + lo, hi carrying 26 fraction bits, so
# n*hi is exact for n < 2**26.  Near zeros of sin(pi n x) the kernel is so
# sensitive to x that plain n*x rounding shows up at the 1e-9 level.
_SPLIT = 67108864.0  # 2**26
_TINY = 1e-100


@njit
def _frac_mul(n, x):
    """``n*x`` reduced to [-1/2, 1/2]."""
    hi = np.floor(x * _SPLIT) / _SPLIT
    lo = x - hi
    a = n * hi
    a -= np.floor(a + 0.5)
    t = a + n * lo
    return t - np.floor(t + 0.5)


def _frac_mul_numpy(n, x):
    hi = np.floor(x * _SPLIT) / _SPLIT
    lo = x - hi
    a = n * hi
    a = a - np.floor(a + 0.5)
    t = a + n * lo
    return t - np.floor(t + 0.5)


@njit
def _phi_scalar(n, x):
    xr = x - np.floor(x + 0.5)
    if xr == 0.0:
        return float(n) * float(n)
    tr = _frac_mul(n, x)
    if abs(xr) < _TINY:
        # both sines equal their arguments; pi*x loses digits for subnormal x
        r = tr / xr
    else:
        r = np.sin(np.pi * tr) / np.sin(np.pi * xr)
    return r * r


@njit
def phi_numba(n, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _phi_scalar(n, x[i])
    return out


def phi_numpy(n, x):
    x = np.asarray(x, dtype=float)
    xr = x - np.floor(x + 0.5)
    tr = _frac_mul_numpy(n, x)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.sin(np.pi * tr) / np.sin(np.pi * xr)
        tiny = np.abs(xr) < _TINY
        r[tiny] = tr[tiny] / xr[tiny]
    out = r * r
    out[xr == 0.0] = float(n) * float(n)
    return out


# -- c(n) for atomic measures --------------------------------------------------------------

@njit
def atomic_c_numba(points, weights, ns):
    out = np.empty(ns.shape[0])
    for k in range(ns.shape[0]):
        acc = 0.0
        for j in range(points.shape[0]):
            acc += weights[j] * _phi_scalar(ns[k], points[j])
        out[k] = acc
    return out


def atomic_c_numpy(points, weights, ns):
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    return np.array([np.dot(weights, phi_numpy(int(n), points)) for n in ns])


# -- direct orbit sums  ||sum_{m<n} U^m b||^2,  U = diag(exp(2 pi i x_j)) ------------------------

# The sums can cancel to ~1e-5 of the term size, below the rounding noise of
# double-precision phases, so U is applied by repeated double-double
# multiplication with a phase ``u = exp(2 pi i x)`` supplied as hi + lo parts.

_DEKKER = 134217729.0  # 2**27 + 1


@njit
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit
def _two_prod(a, b):
    p = a * b
    t = _DEKKER * a
    ah = t - (t - a)
    al = a - ah
    t = _DEKKER * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit
def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e += al + bl
    h = s + e
    return h, e - (h - s)


@njit
def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    h = p + e
    return h, e - (h - p)


@njit
def orbit_norm_sq_numba(u_re, u_im, b_abs2, nmax):
    """``u_re``/``u_im`` are (d, 2) hi/lo arrays; ``b_abs2 = |b_j|^2``."""
    d = u_re.shape[0]
    out = np.zeros(nmax)
    for j in range(d):
        zrh, zrl, zih, zil = 1.0, 0.0, 0.0, 0.0  # u^m
        srh, srl, sih, sil = 0.0, 0.0, 0.0, 0.0  # sum_{k<=m} u^k
        urh, url, uih, uil = u_re[j, 0], u_re[j, 1], u_im[j, 0], u_im[j, 1]
        for m in range(nmax):
            srh, srl = _dd_add(srh, srl, zrh, zrl)
            sih, sil = _dd_add(sih, sil, zih, zil)
            out[m] += b_abs2[j] * ((srh * srh + sih * sih) + 2.0 * (srh * srl + sih * sil))
            ah, al = _dd_mul(zrh, zrl, urh, url)
            bh, bl = _dd_mul(zih, zil, uih, uil)
            ch, cl = _dd_mul(zrh, zrl, uih, uil)
            eh, el = _dd_mul(zih, zil, urh, url)
            zrh, zrl = _dd_add(ah, al, -bh, -bl)
            zih, zil = _dd_add(ch, cl, eh, el)
    return out


def _np_two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _np_split(a):
    t = _DEKKER * a
    hi = t - (t - a)
    return hi, a - hi


def _np_dd_add(ah, al, bh, bl):
    s, e = _np_two_sum(ah, bh)
    e = e + al + bl
    h = s + e
    return h, e - (h - s)


def _np_dd_mul(ah, al, bh, bl):
    p = ah * bh
    a1, a2 = _np_split(ah)
    b1, b2 = _np_split(bh)
    e = ((a1 * b1 - p) + a1 * b2 + a2 * b1) + a2 * b2
    e = e + ah * bl + al * bh
    h = p + e
    return h, e - (h - p)


def orbit_norm_sq_numpy(u_re, u_im, b_abs2, nmax):
    d = u_re.shape[0]
    zrh, zrl = np.ones(d), np.zeros(d)
    zih, zil = np.zeros(d), np.zeros(d)
    srh, srl, sih, sil = np.zeros(d), np.zeros(d), np.zeros(d), np.zeros(d)
    urh, url, uih, uil = u_re[:, 0], u_re[:, 1], u_im[:, 0], u_im[:, 1]
    out = np.empty(nmax)
    for m in range(nmax):
        srh, srl = _np_dd_add(srh, srl, zrh, zrl)
        sih, sil = _np_dd_add(sih, sil, zih, zil)
        out[m] = np.sum(b_abs2 * ((srh * srh + sih * sih) + 2.0 * (srh * srl + sih * sil)))
        ah, al = _np_dd_mul(zrh, zrl, urh, url)
        bh, bl = _np_dd_mul(zih, zil, uih, uil)
        ch, cl = _np_dd_mul(zrh, zrl, uih, uil)
        eh, el = _np_dd_mul(zih, zil, urh, url)
        zrh, zrl = _np_dd_add(ah, al, -bh, -bl)
        zih, zil = _np_dd_add(ch, cl, eh, el)
    return out


def unit_phase_dd(points) -> tuple[np.ndarray, np.ndarray]:
    """``exp(2 pi i x)`` for each point as (d, 2) hi/lo arrays of real and imaginary parts."""
    re = np.empty((len(points), 2))
    im = np.empty((len(points), 2))
    with mpmath.workdps(40):
        for j, x in enumerate(points):
            c, s = mpmath.cospi(2 * mpmath.mpf(float(x))), mpmath.sinpi(2 * mpmath.mpf(float(x)))
            for arr, v in ((re, c), (im, s)):
                hi = float(v)
                arr[j] = hi, float(v - hi)
    return re, im


# -- Edelstein orbit of 0: sum_n |1 - exp(2 pi i m / n!)|^2 ------------------------------------

@njit
def _edelstein_frac(m, n, fact_int, fact_float):
    if n <= 20:
        f = fact_int[n - 1]
        return (m % f) / float(f)
    return m / fact_float[n - 1]


@njit
def edelstein_norm_sq_numba(ms, nmax, fact_int, fact_float):
    out = np.empty(ms.shape[0])
    for i in range(ms.shape[0]):
        acc = 0.0
        for n in range(1, nmax + 1):
            s = np.sin(np.pi * _edelstein_frac(ms[i], n, fact_int, fact_float))
            acc += 4.0 * s * s
        out[i] = acc
    return out


def edelstein_norm_sq_numpy(ms, nmax, fact_int=FACT_INT, fact_float=FACT_FLOAT):
    ms = np.asarray(ms, dtype=np.int64)
    acc = np.zeros(ms.shape[0])
    for n in range(1, nmax + 1):
        if n <= 20:
            frac = (ms % fact_int[n - 1]) / float(fact_int[n - 1])
        else:
            frac = ms / fact_float[n - 1]
        acc += 4.0 * np.sin(np.pi * frac) ** 2
    return acc


# -- tree cocycle: sum over half-spaces of |chi_g - chi_e|^p ------------------------------------
# ``anc[x, d]`` is the id of the length-d prefix of x (or -1); edge i joins
# parent to child ``edge_child[i]`` of length ``edge_depth[i]``.

@njit
def tree_halfspace_sums_numba(anc, edge_child, edge_depth, p):
    n = anc.shape[0]
    out = np.zeros(n)
    for g in range(n):
        acc = 0.0
        for i in range(edge_child.shape[0]):
            inside_g = anc[g, edge_depth[i]] == edge_child[i]
            # the identity lies in no child subtree, so both orientations differ iff inside_g
            if inside_g:
                acc += 2.0 * (1.0 ** p)
        out[g] = acc
    return out


def tree_halfspace_sums_numpy(anc, edge_child, edge_depth, p):
    inside = anc[:, edge_depth] == edge_child[None, :]
    return 2.0 * inside.sum(axis=1).astype(float) * (1.0 ** p)


# -- dispatch ------------------------------------------------------------------------------------

def phi(n: int, x) -> np.ndarray:
    x = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    return phi_numba(int(n), x) if _jit.USE_NUMBA else phi_numpy(int(n), x)


def atomic_c(points, weights, ns) -> np.ndarray:
    points = np.ascontiguousarray(points, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    ns = np.ascontiguousarray(np.atleast_1d(ns), dtype=np.int64)
    if _jit.USE_NUMBA:
        return atomic_c_numba(points, weights, ns)
    return atomic_c_numpy(points, weights, ns)


def orbit_norm_sq(points, b, nmax: int) -> np.ndarray:
    """``||sum_{m<n} U^m b||^2`` for n = 1..nmax, ``U = diag(exp(2 pi i points))``."""
    u_re, u_im = unit_phase_dd(np.asarray(points, dtype=float))
    b_abs2 = np.ascontiguousarray(np.abs(np.asarray(b, dtype=np.complex128)) ** 2)
    if _jit.USE_NUMBA:
        return orbit_norm_sq_numba(u_re, u_im, b_abs2, int(nmax))
    return orbit_norm_sq_numpy(u_re, u_im, b_abs2, int(nmax))


def edelstein_norm_sq(ms, nmax: int) -> np.ndarray:
    if not 0 <= nmax <= MAX_EDELSTEIN_COORDS:
        raise ValueError(f"nmax must lie in 0..{MAX_EDELSTEIN_COORDS}")
    ms = np.ascontiguousarray(np.atleast_1d(ms), dtype=np.int64)
    if _jit.USE_NUMBA:
        return edelstein_norm_sq_numba(ms, int(nmax), FACT_INT, FACT_FLOAT)
    return edelstein_norm_sq_numpy(ms, int(nmax))


def tree_halfspace_sums(anc, edge_child, edge_depth, p: float) -> np.ndarray:
    if _jit.USE_NUMBA:
        return tree_halfspace_sums_numba(anc, edge_child, edge_depth, float(p))
    return tree_halfspace_sums_numpy(anc, edge_child, edge_depth, float(p))
