import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocyclelab import spectral_z as sz
from cocyclelab.errors import ParameterError


def dirichlet_sq(n, x):
    # |sum_{j<n} e(jx)|^2 summed term by term
    x = np.asarray(x, dtype=float)
    s = np.exp(2j * np.pi * np.multiply.outer(x, np.arange(n))).sum(axis=-1)
    return np.abs(s) ** 2


class TestPhi:
    def test_n_one(self):
        assert np.allclose(sz.phi(1, [0.1, 0.3, 0.77]), 1.0)

    def test_at_zero(self):
        assert sz.phi(7, 0.0)[0] == 49.0

    @pytest.mark.parametrize("n,x", [(2, 0.5), (3, 1 / 3), (4, 0.25), (6, 0.5)])
    def test_roots(self, n, x):
        assert abs(sz.phi(n, x)[0]) < 1e-25

    def test_half_odd(self):
        assert sz.phi(5, 0.5)[0] == pytest.approx(1.0, abs=1e-15)

    @settings(max_examples=60)
    @given(st.integers(1, 200), st.floats(0.0, 1.0, exclude_max=True))
    def test_matches_dirichlet_sum(self, n, x):
        assert sz.phi(n, x)[0] == pytest.approx(dirichlet_sq(n, [x])[0], rel=1e-9, abs=1e-9 * n)

    def test_bad_n(self):
        with pytest.raises(ParameterError):
            sz.phi(0, 0.1)


class TestAtomic:
    def test_atom_at_half(self):
        mu = sz.AtomicMeasure([0.5], [1.0])
        c = sz.growth_curve(mu, range(1, 11))
        assert np.allclose(c, [1, 0] * 5, atol=1e-25)

    def test_atom_at_zero_is_quadratic(self):
        mu = sz.AtomicMeasure([0.0], [2.0])
        assert np.array_equal(sz.growth_curve(mu, [1, 2, 3]), [2.0, 8.0, 18.0])

    @pytest.mark.parametrize("pts,wts", [([0.1, 0.1], [1, 1]), ([1.0], [1]), ([0.2], [0.0]), ([0.2], [1, 2])])
    def test_validation(self, pts, wts):
        with pytest.raises(ParameterError):
            sz.AtomicMeasure(pts, wts)

    @settings(max_examples=40)
    @given(st.integers(0, 10_000), st.integers(1, 300))
    def test_bounded_by_n_squared_mass(self, seed, n):
        mu = sz.random_atomic(np.random.default_rng(seed))
        assert 0 <= sz.cocycle_norm_sq(mu, n) <= n * n * mu.mass * (1 + 1e-12)

    @settings(max_examples=20)
    @given(st.integers(0, 10_000))
    def test_orbit_sum_oracle(self, seed):
        mu = sz.random_atomic(np.random.default_rng(seed), 6)
        ns = np.arange(1, 41)
        direct = np.array([np.sum(mu.weights * dirichlet_sq(int(n), mu.points)) for n in ns])
        assert np.allclose(sz.atomic_orbit_norm_sq(mu, 40), direct, rtol=1e-10)
        assert np.allclose(sz.growth_curve(mu, ns), direct, rtol=1e-10)


class TestDensity:
    def test_fejer(self):
        ns = np.arange(1, 65)
        assert np.allclose(sz.growth_curve(sz.lebesgue(), ns), ns, rtol=1e-13)

    def test_quad_path(self):
        mu = sz.DensityMeasure(lambda x: np.ones_like(np.asarray(x, dtype=float)))
        for n in (1, 5, 17):
            assert sz.cocycle_norm_sq(mu, n) == pytest.approx(n, rel=1e-9)

    def test_shift_delta(self):
        assert sz.shift_orbit_norm_sq({0: 1}, 9) == 9.0
        assert sz.cocycle_norm_sq(sz.measure_from_shift_vector({0: 1}), 9) == pytest.approx(9.0, rel=1e-13)

    def test_shift_coboundary(self):
        # f = delta_0 - delta_1 telescopes to delta_0 - delta_n
        f = {0: 1, 1: -1}
        assert [sz.shift_orbit_norm_sq(f, n) for n in (1, 2, 10)] == [2.0, 2.0, 2.0]
        mu = sz.measure_from_shift_vector(f)
        assert mu.mass == 2.0
        assert sz.cocycle_norm_sq(mu, 10) == pytest.approx(2.0, rel=1e-12)

    def test_zero_shift_vector(self):
        with pytest.raises(ParameterError):
            sz.measure_from_shift_vector({3: 0})

    def test_random_shift_vectors(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            size = int(rng.integers(1, 8))
            lo = int(rng.integers(-5, 5))
            f = {lo + i: complex(*rng.standard_normal(2)) for i in range(size)}
            mu = sz.measure_from_shift_vector(f)
            for n in (1, 3, 10, 40):
                direct = sz.shift_orbit_norm_sq(f, n)
                assert abs(sz.cocycle_norm_sq(mu, n) - direct) <= 1e-8 * direct

    def test_unsupported_measure(self):
        with pytest.raises(TypeError):
            sz.cocycle_norm_sq(object(), 3)

    def test_curve_csv(self):
        text = sz.curve_csv([1, 2], [1.0, 2.0])
        assert text.splitlines()[0] == "n,c_n"


class TestEdelstein:
    def test_first_values(self):
        # coordinate n contributes |1 - e(m/n!)|^2
        want = sum(abs(1 - np.exp(2j * np.pi / math.factorial(n))) ** 2 for n in range(1, 13))
        assert sz.edelstein_orbit_norm_sq(1) == pytest.approx(want, rel=1e-14)
        assert sz.edelstein_orbit_norm_sq(math.factorial(12)) == pytest.approx(0.0, abs=1e-20)

    def test_state_iteration_matches_closed_form(self):
        state = sz.EdelsteinState.origin(8)
        for m in range(1, 60):
            state = state.apply()
            assert state.norm_sq() == pytest.approx(sz.edelstein_orbit_norm_sq(m, 8), abs=1e-11)
        assert sz.EdelsteinState.origin(8).apply(59).norm_sq() == pytest.approx(state.norm_sq(), abs=1e-11)

    @pytest.mark.parametrize("n", range(1, 10))
    def test_factorial_dips(self, n):
        assert sz.edelstein_orbit_norm_sq(math.factorial(n)) <= sz.edelstein_dip_bound(n) * (1 + 1e-12)

    def test_dip_bound_decreasing(self):
        b = [sz.edelstein_dip_bound(n) for n in range(1, 12)]
        assert all(y < x for x, y in zip(b, b[1:]))
        assert sz.edelstein_dip_bound(12) == 0.0

    def test_almost_fixed_decreasing(self):
        vals = [sz.edelstein_almost_fixed(m) for m in range(1, 12)]
        assert all(y < x for x, y in zip(vals, vals[1:]))
        for m in (1, 3, 6):
            want = math.sqrt(sum(abs(1 - np.exp(2j * np.pi / math.factorial(n))) ** 2 for n in range(m + 1, 40)))
            assert sz.edelstein_almost_fixed(m) == pytest.approx(want, rel=1e-12)
        with pytest.raises(ParameterError):
            sz.edelstein_almost_fixed(0)

    def test_profile(self):
        prof = sz.edelstein_profile(24)
        assert len(prof.samples) == 24 and prof.scale == prof.norms[0]


@pytest.fixture(scope="module")
def cantor():
    return sz.build_cantor_measure()


class TestCantorParams:
    def test_default_admissible(self):
        assert sz.DEFAULT_CANTOR_PARAMS.violations() == []

    def test_small_default_rejected(self):
        p = sz.CantorParams.power_law((8, 2**21), 5, k=(1, 2), depth=2)
        assert p.violations()
        with pytest.raises(ParameterError):
            sz.build_cantor_measure(p)

    def test_order_checks(self):
        assert sz.CantorParams((16, 8), (Fraction(1, 2), Fraction(1, 4)), (1,), 2).violations()
        assert sz.CantorParams((16,), (Fraction(1, 2),), (1,), 3).violations()


class TestCantorMeasure:
    def test_mass_and_support(self, cantor):
        with mpmath.workdps(sz.CANTOR_DPS):
            assert abs(cantor.mass() - 1) < mpmath.mpf(10) ** -70
        assert cantor.support_max() <= Fraction(1, 2)

    def test_nested_levels(self, cantor):
        top, leaves = cantor.levels
        for iv in leaves:
            assert any(p.lo <= iv.lo and iv.hi <= p.hi for p in top)
        with mpmath.workdps(sz.CANTOR_DPS):
            assert abs(mpmath.fsum(iv.weight for iv in top) - cantor.mass()) < mpmath.mpf(10) ** -70

    def test_leaves_near_lattice(self, cantor):
        p = cantor.params
        for iv in cantor.leaves:
            for lvl in range(p.depth):
                n, e = p.N[lvl], p.eps[lvl]
                mid = (iv.lo + iv.hi) / 2
                assert abs(mid * n - round(mid * n)) <= e

    @pytest.mark.parametrize("level", [1, 2])
    def test_calibration(self, cantor, level):
        chk = sz.calibration_check(cantor, level)
        assert chk.error <= 1e-60 * chk.target

    @pytest.mark.parametrize("level", [1, 2])
    def test_growth_bound(self, cantor, level):
        chk = sz.cantor_growth_bound_check(cantor, level)
        assert chk.holds and chk.margin >= 0 and chk.c <= chk.bound

    @pytest.mark.parametrize("level", [1, 2])
    def test_singular_integral(self, cantor, level):
        chk = sz.cantor_singular_integral_check(cantor, level)
        assert chk.holds and chk.integral >= chk.lower_bound
        assert chk.exact_integrand == pytest.approx(chk.away_from_origin / 4)

    def test_growth_bound_decreases(self, cantor):
        b = [sz.cantor_growth_bound_check(cantor, lvl).bound for lvl in (1, 2)]
        assert b[1] < b[0]

    def test_lower_bounds_increase(self, cantor):
        b = [sz.cantor_singular_integral_check(cantor, lvl).lower_bound for lvl in (1, 2)]
        assert b[1] > b[0]

    def test_c1_is_mass(self, cantor):
        assert sz.cocycle_norm_sq(cantor, 1) == pytest.approx(1.0, rel=1e-30)

    def test_csv(self, cantor):
        lines = cantor.to_csv().splitlines()
        assert lines[0] == "level,lo,hi,weight"
        assert len(lines) == 1 + sum(len(lvl) for lvl in cantor.levels)
