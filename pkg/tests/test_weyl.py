import itertools

import pytest

from qfold.cartan import builtin, builtin_folding, make_automorphism, make_datum
from qfold.errors import NotFiniteTypeError, NotReducedError
from qfold.weyl import (
    ReducedWord, beta_sequence, is_reduced, lift_word, longest_element,
    pair_vectors, reduced_words, reflect, root_system, sigma_on_word,
)

P = "′"
PP = "″"


def W(name, labels):
    d, _ = builtin(name)
    return ReducedWord.from_labels(d, labels)


def test_longest_lengths():
    for name, nu in (("A2", 3), ("A3", 6), ("D4", 12), ("B2", 4), ("G2", 6),
                     ("A2xA2", 6)):
        d, _ = builtin(name)
        got, word = longest_element(d)
        assert got == nu
        assert len(word) == nu


def test_not_finite_type_detected():
    # affine A1~ : positive semidefinite form
    d = make_datum(["0", "1"], [[2, -2], [-2, 2]])
    with pytest.raises(NotFiniteTypeError):
        longest_element(d)


def test_is_reduced():
    d, _ = builtin("A2")
    assert is_reduced(d, (0, 1, 0))
    assert not is_reduced(d, (0, 0))
    d4, _ = builtin("D4")
    w = ReducedWord.from_labels(
        d4, ["2", "2" + P, "2" + PP, "1"] * 3)
    assert len(w) == 12
    with pytest.raises(NotReducedError):
        ReducedWord(d, (0, 0))


def test_beta_sequence_a2():
    d, _ = builtin("A2")
    w = ReducedWord(d, (0, 1, 0))
    assert beta_sequence(w) == ((1, 0), (1, 1), (0, 1))


def test_beta_sequence_a3():
    d, _ = builtin("A3")
    w = W("A3", ["2", "2" + P, "1", "2", "2" + P, "1"])
    names = [d.root_name(b) for b in beta_sequence(w)]
    assert names == ["2", "2" + P, "122" + P, "12" + P, "12", "1"]


def test_beta_sequence_d4_paper_word():
    d, _ = builtin("D4")
    w = W("D4", ["2", "2" + P, "2" + PP, "1"] * 3)
    names = [d.root_name(b) for b in beta_sequence(w)]
    assert names == [
        "2", "2" + P, "2" + PP,
        "122" + P + "2" + PP, "12" + P + "2" + PP, "122" + PP, "122" + P,
        "1122" + P + "2" + PP,
        "12", "12" + P, "12" + PP, "1",
    ]


def test_beta_sequence_enumerates_positive_roots():
    for name in ("A2", "B2"):
        d, _ = builtin(name)
        rs = root_system(d)
        for letters in reduced_words(d):
            bs = beta_sequence(ReducedWord(d, letters))
            assert sorted(bs) == sorted(rs.roots[: rs.n_positive])
    for name in ("A3", "D4", "G2"):
        d, _ = builtin(name)
        rs = root_system(d)
        for letters in reduced_words(d, limit=20):
            bs = beta_sequence(ReducedWord(d, letters))
            assert sorted(set(bs)) == sorted(rs.roots[: rs.n_positive])


def test_reflections_preserve_form():
    d, _ = builtin("D4")
    vecs = [(1, 0, 0, 0), (1, 1, 0, 1), (2, 1, 1, 1), (0, 1, 1, 0)]
    for x, y in itertools.product(vecs, repeat=2):
        for i in range(d.rank):
            assert pair_vectors(d, reflect(d, i, x), reflect(d, i, y)) == \
                pair_vectors(d, x, y)


def test_lift_word_a3():
    folding = builtin_folding("A3")
    ul = ReducedWord.from_labels(folding.quotient, ["u2", "u1", "u2", "u1"])
    lifted = lift_word(folding, ul)
    assert lifted.word.labels == ("2", "2" + P, "1", "2", "2" + P, "1")
    assert lifted.blocks == ((0, 1), (2,), (3, 4), (5,))


def test_lift_word_d4():
    folding = builtin_folding("D4")
    ul = ReducedWord.from_labels(folding.quotient, ["u2", "u1"] * 3)
    lifted = lift_word(folding, ul)
    assert lifted.word.labels == ("2", "2" + P, "2" + PP, "1") * 3
    nu, _ = longest_element(folding.source)
    assert len(lifted.word) == nu == sum(len(b) for b in lifted.blocks)


def test_lift_word_trivial_fold():
    d, _ = builtin("A2")
    from qfold.cartan import fold, make_automorphism
    folding = fold(d, make_automorphism(d, ["1", "2"]))
    _, w0 = longest_element(folding.quotient)
    lifted = lift_word(folding, w0)
    assert lifted.word.letters == w0.letters


def test_sigma_on_word():
    d = make_datum(["1", "2", "3"],
                   [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    aut = make_automorphism(d, ["3", "2", "1"])
    assert sigma_on_word(aut, (0, 1)) == (2, 1)
    d4, aut4 = builtin("D4")
    w = tuple(d4.index(x) for x in ("2", "1", "2" + P))
    assert tuple(d4.labels[i] for i in sigma_on_word(aut4, w)) == \
        ("2" + P, "1", "2" + PP)


def test_sigma_of_lifted_word_is_block_permutation():
    for name in ("A2xA2", "A3", "D4"):
        folding = builtin_folding(name)
        _, ulw0 = longest_element(folding.quotient)
        lifted = lift_word(folding, ulw0)
        img = sigma_on_word(folding.aut, lifted.word.letters)
        assert is_reduced(folding.source, img)
        pp = lifted.position_permutation()
        assert sorted(pp) == list(range(len(lifted.word)))
        assert tuple(lifted.word.letters[pp[j]] for j in range(len(img))) == img


def test_reduced_word_count_rank2():
    d, _ = builtin("B2")
    assert len(list(reduced_words(d))) == 2
    g2, _ = builtin("G2")
    assert len(list(reduced_words(g2))) == 2
