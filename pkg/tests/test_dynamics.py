import random

import pytest
import sympy
from hypothesis import given, strategies as st

from dca.dynamics import (
    ALPHABET,
    LAMBDA,
    Word,
    abelianization_matrix,
    decode,
    growth_series,
    perron_certificate,
    recode,
    recoded_rules,
    recoded_substitute,
    substitute,
    substitution_length,
)
from dca.errors import LengthCap, TooShort

words = st.text(alphabet="bw", min_size=2, max_size=40)


def test_alternating_word_grows_to_32_letters():
    out = substitute(Word("bw" * 4))
    assert len(out) == 32
    assert out.equivalent(Word("bwbwwbwb" * 4))


def test_second_step_has_120_letters():
    assert len(substitute(Word("bwbwwbwb" * 4))) == 120


def test_bb_cyclic():
    out = substitute(Word("bb"))
    assert out.letters == "bwbbwb"


def test_linear_words_drop_the_wrap_pair():
    assert substitute(Word("bw", cyclic=False)).letters == "bwbw"
    assert substitute(Word("bwb", cyclic=False)).letters == "bwbwwbwb"


def test_too_short():
    with pytest.raises(TooShort):
        substitute(Word("b"))
    with pytest.raises(TooShort):
        Word("")
    with pytest.raises(TooShort):
        recode(Word("w"))


def test_bad_letters():
    with pytest.raises(ValueError):
        Word("bx")


def test_equivalence_is_rotation():
    assert Word("bbw").equivalent(Word("wbb"))
    assert not Word("bbw").equivalent(Word("bww"))
    assert not Word("bw", cyclic=False).equivalent(Word("wb", cyclic=False))


@given(words)
def test_length_law(s):
    w = Word(s)
    pairs = w.pairs()
    alt = sum(p[0] != p[1] for p in pairs)
    assert len(substitute(w)) == 4 * alt + 3 * (len(pairs) - alt) == substitution_length(w)


@given(st.integers(1, 20), st.randoms(use_true_random=False))
def test_balance_is_preserved(n, rnd):
    letters = list("b" * n + "w" * n)
    rnd.shuffle(letters)
    out = substitute(Word("".join(letters)))
    assert out.count("b") == out.count("w")


@given(words)
def test_swap_equivariance(s):
    w = Word(s)
    assert substitute(w.swapped()).letters == substitute(w).swapped().letters


def test_recode_alternating():
    rec = recode(Word("bw" * 4))
    assert Word(decode(rec).letters).equivalent(Word("bw" * 4))
    # same cyclic symbol sequence as (w_b b_w)^4
    assert ",".join(rec) in ",".join(("w_b", "b_w") * 8)


def test_decode_recode_round_trip_random():
    rng = random.Random(0)
    for _ in range(1000):
        s = "".join(rng.choice("bw") for _ in range(rng.randint(2, 30)))
        for cyclic in (True, False):
            w = Word(s, cyclic)
            assert decode(recode(w), cyclic) == w


def test_decode_rejects_bad_overlap():
    with pytest.raises(ValueError):
        decode(("w_b", "w_b"))
    with pytest.raises(ValueError):
        decode(("x_y",))


def test_recoded_rules_match_the_listed_images():
    assert recoded_rules() == {
        "w_b": ("w_b", "b_w", "w_b", "w_w"),
        "w_w": ("b_w", "w_b", "w_w"),
        "b_w": ("b_w", "w_b", "b_w", "b_b"),
        "b_b": ("w_b", "b_w", "b_b"),
    }


@given(words)
def test_recoded_substitution_commutes(s):
    w = Word(s)
    assert decode(recoded_substitute(recode(w))).equivalent(substitute(w))


def test_abelianization_matrix():
    A = abelianization_matrix()
    assert A == [[2, 1, 1, 1], [1, 2, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    assert [sum(col) for col in zip(*A)] == [4, 4, 3, 3]


@given(words, st.integers(1, 3))
def test_abelianized_iteration_matches_words(s, j):
    A = sympy.Matrix(abelianization_matrix())
    w = Word(s)
    count = sympy.Matrix([recode(w).count(a) for a in ALPHABET])
    for _ in range(j):
        w = substitute(w)
    assert list(A**j * count) == [recode(w).count(a) for a in ALPHABET]


def test_perron_certificate():
    cert = perron_certificate()
    assert cert.valid
    assert cert.charpoly == (1, -6, 10, -6, 1)
    assert cert.cofactor == (1, -2, 1)
    assert cert.quotient == ((3, 2), (1, 1))
    (a, b), (c, d) = cert.quotient
    assert a + d == 4 and a * d - b * c == 1
    assert cert.value == pytest.approx(3.7320508075688772)
    # independent oracle: sympy's eigenvalues
    eig = sympy.Matrix(abelianization_matrix()).eigenvals()
    assert max(eig, key=lambda e: float(e)) == 2 + sympy.sqrt(3)


def test_growth_from_alternating_word():
    gs = growth_series(Word("bw" * 4), 4)
    assert gs.lengths == [8, 32, 120, 448, 1672]
    assert abs(gs.ratios[-1] - LAMBDA) < 2e-4


def test_growth_from_ww():
    gs = growth_series(Word("ww"), 8)
    assert gs.lengths[:4] == [2, 6, 22, 82]
    assert gs.deviations[-1] < 1e-4


def test_length_cap():
    with pytest.raises(LengthCap):
        growth_series(Word("bw" * 4), 10, cap=1000)
    with pytest.raises(ValueError):
        growth_series(Word("bw"), 0)
