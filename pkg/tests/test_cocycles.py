import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocyclelab import spectral_z as sz
from cocyclelab.acceptance import random_integer_element, random_reduced_word
from cocyclelab.cocycles import (
    BallRegular,
    CocycleSpec,
    DiagonalRep,
    GrowthProfile,
    GrowthThresholds,
    check_cocycle_identity,
    classify_growth,
    coboundary_spec,
    evaluate_cocycle,
    free_group_regular,
    growth_profile,
    integer_shift,
)
from cocyclelab.errors import ParameterError, RankMismatchError
from cocyclelab.freegroup import ReducedWord, enumerate_ball, parse_word
from cocyclelab.group_algebra import AlgebraElement, FiniteFunction

REP2 = free_group_regular(2)


def integer_spec(seed):
    rng = np.random.default_rng(seed)
    return CocycleSpec(2, (random_integer_element(rng, 2), random_integer_element(rng, 2)), REP2)


def naive_value(spec, word):
    # right-to-left fold of the cocycle rule written independently of evaluate_cocycle
    pi = spec.representation
    if word.is_identity:
        return pi.zero()
    head = ReducedWord(word.rank, word.letters[:1])
    tail = ReducedWord(word.rank, word.letters[1:])
    g, e = word.letters[0]
    bh = spec.generator_values[g - 1] if e == 1 else -pi.act(head, spec.generator_values[g - 1])
    return bh + pi.act(head, naive_value(spec, tail))


class TestEvaluate:
    def test_identity_gives_zero(self):
        spec = integer_spec(0)
        assert not evaluate_cocycle(spec, ReducedWord.identity(2))

    def test_generator(self):
        spec = integer_spec(1)
        assert evaluate_cocycle(spec, parse_word("t", 2)) == spec.generator_values[1]

    def test_inverse_generator(self):
        spec = integer_spec(2)
        s_inv = parse_word("S", 2)
        assert evaluate_cocycle(spec, s_inv) == -REP2.act(s_inv, spec.generator_values[0])

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatchError):
            evaluate_cocycle(integer_spec(0), parse_word("s", 1))

    def test_wrong_number_of_values(self):
        with pytest.raises(ParameterError):
            CocycleSpec(2, (AlgebraElement.zero(2),), REP2)

    @settings(max_examples=40)
    @given(st.integers(0, 10_000))
    def test_matches_recursive_oracle(self, seed):
        rng = np.random.default_rng(seed)
        spec = integer_spec(seed)
        w = random_reduced_word(rng, 2, 8)
        assert evaluate_cocycle(spec, w) == naive_value(spec, w)

    @settings(max_examples=60)
    @given(st.integers(0, 10_000))
    def test_cocycle_identity_and_inverse_rule(self, seed):
        rng = np.random.default_rng(seed)
        spec = integer_spec(seed)
        g = random_reduced_word(rng, 2, 4)
        h = random_reduced_word(rng, 2, 4)
        assert evaluate_cocycle(spec, g * h) == evaluate_cocycle(spec, g) + REP2.act(g, evaluate_cocycle(spec, h))
        assert evaluate_cocycle(spec, g.inverse()) == -REP2.act(g.inverse(), evaluate_cocycle(spec, g))


class TestIdentityCheck:
    def test_identity_pairs(self):
        spec = integer_spec(3)
        e = ReducedWord.identity(2)
        assert check_cocycle_identity(spec, [(e, g) for g in enumerate_ball(2, 2).elements]) == 0.0

    def test_random_pairs_exact(self):
        rng = np.random.default_rng(4)
        spec = integer_spec(4)
        pairs = [(random_reduced_word(rng, 2, 6), random_reduced_word(rng, 2, 6)) for _ in range(100)]
        assert check_cocycle_identity(spec, pairs) == 0.0

    def test_ball_regular_matches_exact(self):
        ball = enumerate_ball(2, 6)
        rng = np.random.default_rng(5)
        exact = integer_spec(5)
        dense = CocycleSpec(2, tuple(
            np.array([v[w] for w in ball.elements], dtype=complex) for v in exact.generator_values), BallRegular(ball))
        for _ in range(20):
            g = random_reduced_word(rng, 2, 3)
            want = evaluate_cocycle(exact, g)
            got = evaluate_cocycle(dense, g)
            assert np.array_equal(got, np.array([want[w] for w in ball.elements], dtype=complex))


class TestProfiles:
    def test_zero_cocycle(self):
        spec = CocycleSpec(2, (AlgebraElement.zero(2), AlgebraElement.zero(2)), REP2)
        prof = growth_profile(spec, enumerate_ball(2, 2).elements)
        assert np.all(prof.norms == 0)

    def test_shift_cocycle_sqrt_n(self):
        spec = CocycleSpec(1, (FiniteFunction({0: 1}),), integer_shift())
        words = [parse_word("s" * n, 1) for n in range(1, 11)]
        prof = growth_profile(spec, words, labels=[str(n) for n in range(1, 11)])
        assert np.allclose(prof.norms, np.sqrt(np.arange(1, 11)), rtol=0, atol=1e-15)

    def test_coboundary_bounded(self):
        v = AlgebraElement(2, [(parse_word("e", 2), 2), (parse_word("sT", 2), -1j), (parse_word("tt", 2), 1)])
        spec = coboundary_spec(v, REP2)
        prof = growth_profile(spec, enumerate_ball(2, 4).elements)
        assert prof.norms.max() <= 2 * v.norm() + 1e-12

    def test_diagonal_coboundary(self):
        rng = np.random.default_rng(0)
        rep = DiagonalRep(rng.uniform(-np.pi, np.pi, 5))
        v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        spec = coboundary_spec(v, rep)
        for n in range(1, 30):
            b = evaluate_cocycle(spec, parse_word("s" * n, 1))
            assert np.allclose(b, v - np.exp(1j * n * rep.angles) * v)

    def test_duplicate_labels(self):
        with pytest.raises(ParameterError):
            GrowthProfile([("a", 1.0), ("a", 2.0)])

    def test_csv_roundtrip(self, tmp_path):
        prof = GrowthProfile([("1", 1.0), ("2", math.sqrt(2))])
        path = tmp_path / "p.csv"
        path.write_text(prof.to_csv())
        assert GrowthProfile.from_csv_file(path).samples == prof.samples


def _profile(values, scale=None):
    return GrowthProfile([(str(i), float(v)) for i, v in enumerate(values, 1)], scale=scale)


class TestClassifier:
    def test_constant_is_bounded(self):
        assert classify_growth(_profile([2.0] * 50)).tag == "Bounded"

    def test_sqrt_is_proper_like(self):
        assert classify_growth(_profile(np.sqrt(np.arange(1, 101)))).tag == "ProperLike"

    def test_edelstein_is_neither_like(self):
        prof = sz.edelstein_profile(5040, 12)
        verdict = classify_growth(prof)
        assert verdict.tag == "NeitherLike"
        assert verdict.heuristic and "heuristic=true" in verdict.line()

    def test_edelstein_recurrence_evidence(self):
        y = sz.edelstein_orbit_norm_sq(np.arange(1, 721), 12)
        assert any(b < a for a, b in zip(y, y[1:])) and any(b > a for a, b in zip(y, y[1:]))
        fact = [sz.edelstein_orbit_norm_sq(math.factorial(n), 12) for n in range(1, 7)]
        assert y.max() > 4 * min(fact)

    @settings(max_examples=40)
    @given(st.lists(st.floats(0.0, 100.0), min_size=4, max_size=40), st.floats(0.1, 50.0))
    def test_scale_invariance(self, values, c):
        prof = _profile(values, scale=1.0)
        scaled = _profile([c * v for v in values], scale=c)
        t = GrowthThresholds(bound_threshold=7.0, recurrence_threshold=3.0)
        ts = GrowthThresholds(bound_threshold=7.0 * c, recurrence_threshold=3.0 * c)
        assert classify_growth(prof, t).tag == classify_growth(scaled, ts).tag

    def test_empty_profile(self):
        with pytest.raises(ParameterError):
            classify_growth(GrowthProfile([]))
