import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from braiddyn.braids import BraidWord, Exhausted, compose, geodesic_length, random_word, word_length_bounds
from braiddyn.freegroup import FreeWord, apply_braid, apply_generator, loop_stretch, reduce_letters

B = BraidWord
LOG3 = math.log(3)


def test_reduce_examples():
    assert reduce_letters(2, (1, -1, 2)).letters == (2,)
    assert reduce_letters(2, (1, 2, -2, -1)).letters == ()
    assert reduce_letters(2, (1, 2, -1)).letters == (1, 2, -1)


def test_reduce_order_independent():
    # nested cancellations collapse to the same word
    assert reduce_letters(3, (1, 2, -2, -1, 3)).letters == (3,)
    assert reduce_letters(3, (3, 1, 2, -2, -1)).letters == (3,)


def test_generator_action_displays():
    assert apply_braid(FreeWord.basis(2, 1), B(2, (1,))).letters == (1, 2, -1)
    assert apply_braid(FreeWord.basis(2, 2), B(2, (1,))).letters == (1,)
    assert apply_braid(FreeWord.basis(2, 1), B(2, (1, -1))).letters == (1,)


def test_generator_index_validation():
    with pytest.raises(ValueError):
        apply_generator(FreeWord.basis(2, 1), 2)


def test_apply_braid_squares():
    assert apply_braid(FreeWord.basis(2, 1), B(2, (1, 1))).letters == (1, 2, 1, -2, -1)
    assert apply_braid(FreeWord.basis(2, 2), B(2, (1, 1))).letters == (1, 2, -1)
    w = FreeWord(3, (1, -3, 2))
    assert apply_braid(w, B(3, ())) == w


def test_loop_stretch_values():
    assert loop_stretch(B(2, (1,))) == math.log(3)
    assert loop_stretch(B(3, ())) == 0.0
    assert loop_stretch(B(2, (1, 1))) == math.log(5)


def test_loop_stretch_cap():
    with pytest.raises(Exhausted):
        loop_stretch(B(3, (1, -2) * 20), length_cap=100)


def free_words(rank, max_len=8):
    gens = [g for i in range(1, rank + 1) for g in (i, -i)]
    return st.lists(st.sampled_from(gens), max_size=max_len).map(lambda ls: reduce_letters(rank, ls))


@settings(max_examples=80, deadline=None)
@given(free_words(3))
def test_action_respects_braid_relation(w):
    assert apply_braid(w, B(3, (1, 2, 1))) == apply_braid(w, B(3, (2, 1, 2)))


@settings(max_examples=80, deadline=None)
@given(free_words(4))
def test_action_respects_commutation(w):
    assert apply_braid(w, B(4, (1, 3))) == apply_braid(w, B(4, (3, 1)))


def test_right_action_law():
    rng = np.random.default_rng(2)
    for _ in range(60):
        n = int(rng.integers(2, 5))
        a = random_word(rng, n, int(rng.integers(0, 7)))
        b = random_word(rng, n, int(rng.integers(0, 7)))
        w = reduce_letters(n, [int(g) for g in rng.integers(1, n + 1, size=4)])
        assert apply_braid(apply_braid(w, a), b) == apply_braid(w, compose(a, b))


def test_subadditivity():
    rng = np.random.default_rng(4)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        a = random_word(rng, n, int(rng.integers(0, 9)))
        b = random_word(rng, n, int(rng.integers(0, 9)))
        assert loop_stretch(compose(a, b)) <= loop_stretch(a) + loop_stretch(b) + 1e-12


def test_cross_bound_with_word_metric():
    rng = np.random.default_rng(6)
    for _ in range(40):
        w = random_word(rng, int(rng.integers(2, 5)), int(rng.integers(0, 8)))
        _, up = word_length_bounds(w)
        assert loop_stretch(w) <= LOG3 * up + 1e-12
        exact = geodesic_length(w, budget=150_000)
        assert loop_stretch(w) <= LOG3 * exact + 1e-12


def test_json_round_trip():
    w = FreeWord(3, (1, -2, 3))
    assert FreeWord.from_json(w.to_json()) == w
