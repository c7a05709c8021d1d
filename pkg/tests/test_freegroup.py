import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocyclelab.errors import GeneratorRangeError, RankMismatchError, ResourceError
from cocyclelab.freegroup import (
    ReducedWord,
    all_letters,
    ball_size,
    enumerate_ball,
    invert,
    multiply,
    parse_word,
    reduce,
)


def naive_reduce(letters):
    # repeated scanning, deliberately different from the stack reduction
    out = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if out[i][0] == out[i + 1][0] and out[i][1] == -out[i + 1][1]:
                del out[i:i + 2]
                changed = True
                break
    return tuple(out)


def letters_st(rank=2, max_size=14):
    return st.lists(st.tuples(st.integers(1, rank), st.sampled_from([-1, 1])), max_size=max_size)


def W(text, rank=2):
    return parse_word(text, rank)


class TestReduce:
    def test_adjacent_cancellation(self):
        assert W("stTs") == W("ss")

    def test_inverse_pair_gives_identity(self):
        assert W("sS").is_identity

    def test_middle_cancellation(self):
        assert reduce([(2, 1), (1, -1), (1, 1), (2, 1)], 2) == W("tt")

    def test_generator_out_of_range(self):
        with pytest.raises(GeneratorRangeError):
            reduce([(3, 1)], 2)

    def test_unreduced_construction_rejected(self):
        with pytest.raises(ValueError):
            ReducedWord(2, ((1, 1), (1, -1)))

    @given(letters_st())
    def test_matches_naive_oracle(self, letters):
        assert reduce(letters, 2).letters == naive_reduce(letters)

    @given(letters_st())
    def test_idempotent(self, letters):
        once = reduce(letters, 2)
        assert reduce(once.letters, 2) == once


class TestMultiplyInvert:
    def test_inverse_pair(self):
        assert multiply(W("st"), W("TS")).is_identity

    def test_partial_cancel(self):
        assert multiply(W("st"), W("Ts")) == W("ss")

    def test_identity_law(self):
        w = W("sTTs")
        assert multiply(ReducedWord.identity(2), w) == w

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatchError):
            multiply(W("s", 1), W("s", 2))

    def test_invert_examples(self):
        assert invert(W("sT")) == W("tS")
        assert invert(ReducedWord.identity(2)).is_identity
        assert invert(W("sts")) == W("STS")

    @given(letters_st(), letters_st())
    def test_multiply_is_concatenate_then_reduce(self, a, b):
        assert multiply(reduce(a, 2), reduce(b, 2)).letters == naive_reduce(naive_reduce(a) + naive_reduce(b))

    @given(letters_st(max_size=8), letters_st(max_size=8), letters_st(max_size=8))
    def test_associative(self, a, b, c):
        a, b, c = reduce(a, 2), reduce(b, 2), reduce(c, 2)
        assert (a * b) * c == a * (b * c)

    @given(letters_st(), letters_st())
    def test_word_metric(self, a, b):
        a, b = reduce(a, 2), reduce(b, 2)
        assert len(a * b) <= len(a) + len(b)
        assert len(a.inverse()) == len(a)
        assert (a * a.inverse()).is_identity

    def test_power(self):
        assert W("st") ** 2 == W("stst")
        assert W("st") ** -1 == W("TS")
        assert (W("s") ** 0).is_identity


class TestParse:
    def test_roundtrip(self):
        for text in ["e", "s", "stST", "TTs"]:
            assert str(W(text)) == text

    def test_names(self):
        assert parse_word("aB", 3, "abc").letters == ((1, 1), (2, -1))

    def test_unknown_letter(self):
        with pytest.raises(GeneratorRangeError):
            parse_word("sx", 2)


class TestBall:
    @pytest.mark.parametrize("k,r,size", [(2, 0, 1), (2, 1, 5), (2, 2, 17), (2, 3, 53), (1, 3, 7)])
    def test_sizes(self, k, r, size):
        assert len(enumerate_ball(k, r)) == size

    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("r", range(0, 7))
    def test_closed_formula(self, k, r):
        expected = 2 * r + 1 if k == 1 else 1 + 2 * k * ((2 * k - 1) ** r - 1) // (2 * k - 2)
        assert ball_size(k, r) == expected
        if k < 3 or r < 6:
            assert len(enumerate_ball(k, r)) == expected

    def test_closed_under_inversion(self):
        b = enumerate_ball(2, 4)
        assert all(w.inverse() in b for w in b.elements)

    def test_order_is_breadth_first_lexicographic(self):
        b = enumerate_ball(2, 2)
        assert [str(w) for w in b.elements[:5]] == ["e", "S", "s", "T", "t"]
        lengths = [len(w) for w in b.elements]
        assert lengths == sorted(lengths)
        layer = [w.letters for w in b.elements if len(w) == 2]
        assert layer == sorted(layer)

    def test_letter_order(self):
        assert all_letters(2) == [(1, -1), (1, 1), (2, -1), (2, 1)]

    def test_cap(self):
        with pytest.raises(ResourceError):
            enumerate_ball(3, 10, cap=1000)

    def test_tables(self):
        b = enumerate_ball(2, 2)
        s = b.letter_index((1, 1))
        assert b.elements[b.left_table[b.id_of(W("t")), s]] == W("st")
        assert b.elements[b.right_table[b.id_of(W("t")), s]] == W("ts")
        assert b.left_table[b.id_of(W("tt")), s] == -1

    @settings(max_examples=50)
    @given(letters_st(max_size=3))
    def test_every_short_word_enumerated(self, letters):
        assert reduce(letters, 2) in enumerate_ball(2, 3)
