"""Truncated search for pairs with ``lambda(f1) xi1 + lambda(f2) xi2 = 0``.

Over unit-norm pairs supported in the ball ``B_R`` the best residual is the
smallest singular value of ``M = [lambda(f1) | lambda(f2)]`` mapped into
``B_{R+L}`` (``L`` the longest word in either support), so no truncation loss
occurs.  The singular vector is found by block inverse iteration on the
shifted normal operator ``M^H M + tau I``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..cocycles import CocycleSpec, free_group_regular
from ..errors import NumericalError, ParameterError
from ..freegroup import Ball, ReducedWord, enumerate_ball
from ..group_algebra import AlgebraElement, TruncatedVector, truncated_matrix
from ..io_utils import csv_text
from .elements import fox_elements


@dataclass(frozen=True)
class NullPairResult:
    xi1: TruncatedVector
    xi2: TruncatedVector
    residual: float
    component_norms: tuple[float, float]
    radius: int
    iterations: int = 0

    @property
    def smallest_singular_value(self) -> float:
        return self.residual


def stacked_operator(f1: AlgebraElement, f2: AlgebraElement, radius: int,
                     cap: int | None = None) -> tuple[sp.csr_matrix, Ball, Ball]:
    if f1.rank != f2.rank:
        raise ParameterError("f1 and f2 must share a rank")
    reach = max(f1.max_length(), f2.max_length())
    kw = {} if cap is None else {"cap": cap}
    in_ball = enumerate_ball(f1.rank, radius, **kw)
    out_ball = enumerate_ball(f1.rank, radius + reach, **kw)
    m = sp.hstack([truncated_matrix(f1, in_ball, out_ball),
                   truncated_matrix(f2, in_ball, out_ball)]).tocsr()
    return m, in_ball, out_ball


def smallest_singular_pair(m: sp.spmatrix, seed: int = 0, block: int = 4, tol: float = 1e-14,
                           max_iter: int = 2000) -> tuple[np.ndarray, float, int]:
    """Unit right singular vector for the smallest singular value of ``m``.

    Returns ``(x, ||m x||, iterations)``.  Raises ``NumericalError`` when the
    Ritz value has not settled within ``max_iter`` sweeps.
    """
    n = m.shape[1]
    normal = (m.conj().T @ m).tocsc()
    scale = float(abs(normal).sum(axis=0).max()) or 1.0
    tau = 1e-13 * scale
    lu = spla.splu((normal + tau * sp.identity(n, format="csc", dtype=normal.dtype)).tocsc())
    block = max(1, min(block, n))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, block))
    if np.iscomplexobj(normal.data):
        x = x + 1j * rng.standard_normal((n, block))
    x, _ = np.linalg.qr(x)
    theta_old = np.inf
    for it in range(1, max_iter + 1):
        y = lu.solve(x)
        x, _ = np.linalg.qr(y)
        h = x.conj().T @ (normal @ x)
        evals, evecs = sla.eigh((h + h.conj().T) / 2)
        x = x @ evecs
        theta = float(evals[0])
        if abs(theta - theta_old) <= tol * scale + 1e-12 * abs(theta):
            break
        theta_old = theta
    else:
        raise NumericalError(f"inverse iteration did not settle after {max_iter} sweeps (theta={theta})")
    v = x[:, 0]
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])  # fix the phase: largest entry real positive
    v = v / np.linalg.norm(v)
    return v, float(np.linalg.norm(m @ v)), it


def null_pair_search(f1: AlgebraElement, f2: AlgebraElement, radius: int, seed: int = 0,
                     **kwargs) -> NullPairResult:
    if not f1 or not f2:
        raise ParameterError("f1 and f2 must be nonzero")
    if radius < 1:
        raise ParameterError("radius must be >= 1")
    m, in_ball, _ = stacked_operator(f1, f2, radius)
    v, residual, its = smallest_singular_pair(m, seed=seed, **kwargs)
    n = len(in_ball)
    xi1 = TruncatedVector(in_ball, np.asarray(v[:n], dtype=complex))
    xi2 = TruncatedVector(in_ball, np.asarray(v[n:], dtype=complex))
    return NullPairResult(xi1, xi2, residual, (xi1.norm(), xi2.norm()), radius, its)


def residual_table(results: list[NullPairResult]) -> str:
    return csv_text(["radius", "residual", "norm1", "norm2"],
                    [(r.radius, r.residual, *r.component_norms) for r in results])


def build_vanishing_cocycle(w: ReducedWord, radius: int, seed: int = 0,
                            norm_floor: float = 1e-3) -> CocycleSpec:
    """Cocycle on ``F_2`` with ``b(s), b(t)`` from the null-pair search for ``w``.

    ``||b(w)||`` equals the search residual.  The search result is kept in
    ``spec.meta["search"]``.
    """
    if w.rank != 2:
        raise ParameterError("build_vanishing_cocycle works over F_2")
    missing = {1, 2} - w.generators_used()
    if missing:
        raise ParameterError(
            "w involves a single generator; use fox.vanishing_cocycle_single_generator "
            "(the amalgam construction with H = K = Z)")
    pair = fox_elements(w)
    res = null_pair_search(pair.f_s, pair.f_t, radius, seed=seed)
    n1, n2 = res.component_norms
    if min(n1, n2) < norm_floor:
        warnings.warn(f"lopsided null pair at radius {radius}: |xi_s|={n1:.3e}, |xi_t|={n2:.3e}",
                      stacklevel=2)
    values = (res.xi1.to_function(), res.xi2.to_function())
    return CocycleSpec(2, values, free_group_regular(2), name=f"b_{w}",
                       meta={"search": res, "word": w, "residual": res.residual})
