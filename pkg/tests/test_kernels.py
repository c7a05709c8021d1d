import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocyclelab import _jit, kernels
from cocyclelab.walls_trees import TreeBall

needs_numba = pytest.mark.skipif(not _jit.NUMBA_AVAILABLE, reason="numba not installed")


@needs_numba
class TestAgreement:
    @settings(max_examples=40)
    @given(st.integers(1, 10**6), st.integers(0, 10_000))
    def test_phi(self, n, seed):
        x = np.random.default_rng(seed).random(64)
        x[:3] = [0.0, 0.5, 5e-324]
        assert np.allclose(kernels.phi_numba(n, x), kernels.phi_numpy(n, x), rtol=1e-13, atol=1e-13)

    @settings(max_examples=20)
    @given(st.integers(0, 10_000))
    def test_atomic_c(self, seed):
        rng = np.random.default_rng(seed)
        pts, w = rng.random(12), rng.random(12)
        ns = rng.integers(1, 5000, 30)
        assert np.allclose(kernels.atomic_c_numba(pts, w, ns), kernels.atomic_c_numpy(pts, w, ns), rtol=1e-13)

    @settings(max_examples=20)
    @given(st.integers(0, 10_000))
    def test_orbit(self, seed):
        rng = np.random.default_rng(seed)
        u_re, u_im = kernels.unit_phase_dd(rng.random(9))
        b2 = rng.random(9)
        a = kernels.orbit_norm_sq_numba(u_re, u_im, b2, 300)
        b = kernels.orbit_norm_sq_numpy(u_re, u_im, b2, 300)
        assert np.allclose(a, b, rtol=1e-14)

    def test_edelstein(self):
        ms = np.arange(1, 5000, dtype=np.int64)
        for nmax in (1, 12, 25, 170):
            a = kernels.edelstein_norm_sq_numba(ms, nmax, kernels.FACT_INT, kernels.FACT_FLOAT)
            b = kernels.edelstein_norm_sq_numpy(ms, nmax)
            assert np.allclose(a, b, rtol=1e-13, atol=1e-25)

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
    def test_tree(self, p):
        tb = TreeBall(3, 3)
        a = kernels.tree_halfspace_sums_numba(tb.anc, tb.edge_child, tb.edge_depth, p)
        b = kernels.tree_halfspace_sums_numpy(tb.anc, tb.edge_child, tb.edge_depth, p)
        assert np.array_equal(a, b)


class TestKernelValues:
    def test_phi_subnormal(self):
        x = np.array([5e-324, 1e-310, 1e-101])
        assert np.array_equal(kernels.phi_numpy(4, x), [16.0] * 3)

    def test_phi_exact_reduction(self):
        # n*x mod 1 must not be rounded away: x = 1/3 rounded, n large
        x = np.array([1 / 3])
        n = 3 * 2**20
        assert kernels.phi_numpy(n, x)[0] < 1e-6

    def test_orbit_matches_phase_sum(self):
        pts = np.array([0.1, 0.37])
        b = np.array([1.0, 2.0])
        direct = [np.sum(b**2 * np.abs(np.exp(2j * np.pi * np.outer(np.arange(n), pts)).sum(0)) ** 2)
                  for n in range(1, 21)]
        assert np.allclose(kernels.orbit_norm_sq(pts, b, 20), direct, rtol=1e-12)

    def test_edelstein_range(self):
        with pytest.raises(ValueError):
            kernels.edelstein_norm_sq([1], 171)

    def test_dispatch_fallback(self, monkeypatch):
        rng = np.random.default_rng(1)
        pts, w = rng.random(5), rng.random(5)
        fast = kernels.atomic_c(pts, w, [1, 7, 99])
        monkeypatch.setattr(_jit, "USE_NUMBA", False)
        assert np.allclose(kernels.atomic_c(pts, w, [1, 7, 99]), fast, rtol=1e-13)


SNIPPET = """
import json, numpy as np
from cocyclelab import _jit, spectral_z as sz
mu = sz.AtomicMeasure([0.25, 0.6], [0.5, 0.5])
print(json.dumps({"backend": _jit.backend(), "c": sz.growth_curve(mu, [1, 2, 3, 50]).tolist()}))
"""


def run_snippet(flag):
    env = dict(os.environ)
    env.pop("COCYCLELAB_DISABLE_NUMBA", None)
    if flag is not None:
        env["COCYCLELAB_DISABLE_NUMBA"] = flag
    out = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_env_flag_selects_numpy():
    off = run_snippet("1")
    assert off["backend"] == "numpy"
    on = run_snippet(None)
    assert on["backend"] == ("numba" if _jit.NUMBA_AVAILABLE else "numpy")
    assert np.allclose(off["c"], on["c"], rtol=1e-13)


def test_env_flag_zero_keeps_numba():
    assert run_snippet("0")["backend"] == ("numba" if _jit.NUMBA_AVAILABLE else "numpy")
