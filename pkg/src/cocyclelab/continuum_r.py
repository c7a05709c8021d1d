"""Extending a Z-action ``v -> U v + b`` to an R-flow on a complex coordinate space.

With ``U = diag(exp(i x_j))``, ``x_j`` in ``[-pi, pi)``, the flow is
``upsilon(s) = diag(exp(i s x_j))`` and the cocycle is
``b_xi(t) = integral_0^t upsilon(s) xi ds`` where ``xi = A^-1 b`` and
``A = integral_0^1 upsilon(s) ds``.  Everything is diagonal, so each step is
a per-coordinate closed form.

Only complex coordinates are supported: the construction fails over the reals.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cocycles import GrowthProfile
from .errors import ParameterError
from .io_utils import csv_text

TAYLOR_CUTOFF = 1e-4


@dataclass(frozen=True)
class DiagonalUnitary:
    angles: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.angles, dtype=float))
        if a.ndim != 1:
            raise ParameterError("angles must be a 1-d array")
        if ((a < -np.pi) | (a >= np.pi)).any():
            raise ParameterError("angles must lie in [-pi, pi)")
        object.__setattr__(self, "angles", a)

    @property
    def dim(self) -> int:
        return self.angles.size

    @property
    def diagonal(self) -> np.ndarray:
        return np.exp(1j * self.angles)


def circle_to_angle(p) -> np.ndarray:
    """Map the circle parameter ``p`` in ``[0, 1)`` to an angle in ``[-pi, pi)``."""
    p = np.asarray(p, dtype=float)
    return 2 * np.pi * p - 2 * np.pi * (p >= 0.5)


def one_param(u: DiagonalUnitary, s: float) -> np.ndarray:
    """Diagonal of ``upsilon(s)``."""
    return np.exp(1j * s * u.angles)


def _expm1_ratio(z: np.ndarray) -> np.ndarray:
    """``(e^z - 1)/z`` for purely imaginary ``z``, with a series near 0."""
    out = np.ones_like(z, dtype=complex)
    small = np.abs(z) < TAYLOR_CUTOFF
    zb = z[~small]
    out[~small] = np.expm1(zb) / zb
    zs = z[small]
    out[small] = 1 + zs / 2 + zs**2 / 6 + zs**3 / 24
    return out


def a_diagonal(u: DiagonalUnitary) -> np.ndarray:
    """Diagonal of ``A = integral_0^1 upsilon(s) ds``, i.e. ``(e^{ix} - 1)/(ix)``."""
    return _expm1_ratio(1j * u.angles)


def g(x) -> np.ndarray:
    """``ix/(e^{ix} - 1)``, bounded by pi/2 on ``[-pi, pi)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = 1j * x
    out = np.empty_like(z)
    small = np.abs(x) < TAYLOR_CUTOFF
    zb = z[~small]
    out[~small] = zb / np.expm1(zb)
    zs = z[small]
    out[small] = 1 - zs / 2 + zs**2 / 12 - zs**4 / 720
    return out


@dataclass(frozen=True)
class FlowSpec:
    unitary: DiagonalUnitary
    b: np.ndarray
    xi: np.ndarray

    def inversion_residual(self) -> float:
        r = np.linalg.norm(a_diagonal(self.unitary) * self.xi - self.b)
        nb = np.linalg.norm(self.b)
        return float(r / nb) if nb else float(r)


def solve_flow(u: DiagonalUnitary, b, field: str = "complex") -> FlowSpec:
    if field != "complex":
        raise ParameterError("only complex coordinate spaces are supported; "
                             "the R-extension does not exist in general over the reals")
    b = np.asarray(b, dtype=complex)
    if b.shape != (u.dim,):
        raise ParameterError(f"b has shape {b.shape}, expected ({u.dim},)")
    return FlowSpec(u, b, g(u.angles) * b)


def flow_cocycle(spec: FlowSpec, t: float) -> np.ndarray:
    """``b_xi(t)_j = xi_j (e^{i t x_j} - 1)/(i x_j)``."""
    return spec.xi * t * _expm1_ratio(1j * t * spec.unitary.angles)


def z_cocycle(u: DiagonalUnitary, b, n: int) -> np.ndarray:
    """``b(n) = sum_{j<n} U^j b`` for ``n >= 0`` by direct summation."""
    b = np.asarray(b, dtype=complex)
    d = u.diagonal
    acc = np.zeros_like(b)
    p = b.copy()
    for _ in range(n):
        acc += p
        p = d * p
    return acc


def extend_z_action(u: DiagonalUnitary, b, ts: Sequence[float]) -> GrowthProfile:
    spec = solve_flow(u, b)
    samples = [(f"{t:.17g}", float(np.linalg.norm(flow_cocycle(spec, t)))) for t in ts]
    return GrowthProfile(samples, window=f"t in [{min(ts)}, {max(ts)}], {len(ts)} samples",
                         scale=float(np.linalg.norm(spec.b)) or None)


def profile_csv(profile: GrowthProfile) -> str:
    return csv_text(["t", "norm"], profile.samples)
