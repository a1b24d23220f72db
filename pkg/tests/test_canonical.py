import itertools

import pytest

from qfold.cartan import builtin, builtin_folding
from qfold.errors import SkewError
from qfold.freealg import bar_elt, gen, is_zero, word_elt
from qfold.qarith import LaurentPoly, RationalFn
from qfold.canonical import (
    CanonicalBasisSlice, SliceCache, almost_orthonormal, bar_matrix,
    canonical_slice, compare_slices, sigma_stable_elements, skew_solve,
)
from qfold.pbw import enumerate_c, pbw_expand
from qfold.weyl import ReducedWord, lift_word, longest_element

P = "′"


def L(terms, char=0):
    return LaurentPoly(terms, char)


def all_weights(datum, max_height):
    rank = datum.rank
    for total in range(max_height + 1):
        for mu in itertools.product(range(total + 1), repeat=rank):
            if sum(mu) == total:
                yield mu


def test_skew_solve():
    assert skew_solve(L({1: 1, -1: -1})) == L({1: 1})
    assert skew_solve(LaurentPoly.zero()) == LaurentPoly.zero()
    assert skew_solve(L({3: 1, 1: 1, -1: -1, -3: -1})) == L({3: 1, 1: 1})
    with pytest.raises(SkewError):
        skew_solve(L({1: 1}))


def test_bar_matrix_a2():
    a2, _ = builtin("A2")
    h = ReducedWord.from_labels(a2, ["1", "2", "1"])
    rows = bar_matrix((1, 1), h)
    assert rows[(1, 0, 1)] == {(1, 0, 1): LaurentPoly.one()}
    assert rows[(0, 1, 0)] == {(0, 1, 0): LaurentPoly.one(),
                               (1, 0, 1): L({1: 1, -1: -1})}


def test_bar_matrix_weight_alpha_i():
    a2, _ = builtin("A2")
    h = ReducedWord.from_labels(a2, ["1", "2", "1"])
    rows = bar_matrix((1, 0), h)
    assert rows == {(1, 0, 0): {(1, 0, 0): LaurentPoly.one()}}


def test_bar_matrix_is_involutive():
    a3, _ = builtin("A3")
    h = ReducedWord.from_labels(a3, ["2", "2" + P, "1", "2", "2" + P, "1"])
    for weight in [(1, 1, 0), (1, 1, 1), (2, 1, 1)]:
        rows = bar_matrix(weight, h)
        cs = list(rows)
        for c in cs:
            # sum_d rows[c][d] * bar(rows[d][e]) must be the identity row
            acc = {}
            for d, a in rows[c].items():
                for e, b in rows[d].items():
                    acc[e] = acc.get(e, LaurentPoly.zero()) + a * b.bar()
            acc = {e: v for e, v in acc.items() if not v.is_zero()}
            assert acc == {c: LaurentPoly.one()}


def test_canonical_rank1():
    a2, _ = builtin("A2")
    h = ReducedWord.from_labels(a2, ["1", "2", "1"])
    for n in range(1, 7):
        s = canonical_slice((n, 0), h)
        assert list(s.entries) == [(n, 0, 0)]
        assert s.entries[(n, 0, 0)] == {(n, 0, 0): LaurentPoly.one()}
        assert s.materialize((n, 0, 0)) == gen(a2, "1", n)


def test_canonical_a2_weight11_hand_values():
    # frozen by the hand triangular solve at this single weight:
    # b(1,0,1) = f1 f2 and b(0,1,0) = f2 f1
    a2, _ = builtin("A2")
    h = ReducedWord.from_labels(a2, ["1", "2", "1"])
    s = canonical_slice((1, 1), h)
    assert s.entries[(1, 0, 1)] == {(1, 0, 1): LaurentPoly.one()}
    assert s.entries[(0, 1, 0)] == {(0, 1, 0): LaurentPoly.one(),
                                    (1, 0, 1): L({1: 1})}
    assert s.materialize((1, 0, 1)) == word_elt(a2, ["1", "2"])
    assert is_zero(s.materialize((0, 1, 0)) - word_elt(a2, ["2", "1"]))


def test_canonical_slices_are_bar_fixed_and_unitriangular():
    b2, _ = builtin("B2")
    _, h = longest_element(b2)
    for weight in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)]:
        s = canonical_slice(weight, h)
        for c in s.entries:
            x = s.materialize(c)
            assert is_zero(bar_elt(x) - x)
            for d, a in s.entries[c].items():
                if d == c:
                    assert a == LaurentPoly.one()
                else:
                    assert d > c and a.in_q_only()


def test_independence_a2_exact():
    a2, _ = builtin("A2")
    h1 = ReducedWord.from_labels(a2, ["1", "2", "1"])
    h2 = ReducedWord.from_labels(a2, ["2", "1", "2"])
    for weight in all_weights(a2, 6):
        if not enumerate_c(weight, h1):
            continue
        matching = compare_slices(h1, h2, weight)
        assert all(sign == 1 for _, sign in matching.values())


def test_independence_b2_up_to_sign():
    b2, _ = builtin("B2")
    h1 = ReducedWord.from_labels(b2, ["u1", "u2", "u1", "u2"])
    h2 = ReducedWord.from_labels(b2, ["u2", "u1", "u2", "u1"])
    seen_signs = set()
    for weight in all_weights(b2, 6):
        if not enumerate_c(weight, h1):
            continue
        matching = compare_slices(h1, h2, weight)
        seen_signs.update(sign for _, sign in matching.values())
    assert seen_signs <= {1, -1}


def test_almost_orthonormal_b2():
    b2, _ = builtin("B2")
    _, h = longest_element(b2)
    for weight in [(1, 1), (2, 1), (2, 2)]:
        assert almost_orthonormal(canonical_slice(weight, h))


def test_sigma_stable_elements_a3():
    folding = builtin_folding("A3")
    _, ulw0 = longest_element(folding.quotient)
    lifted = lift_word(folding, ulw0)
    s = canonical_slice((1, 1, 1), lifted.word)
    stable = sigma_stable_elements(s, lifted)
    assert stable  # nonempty
    pp = lifted.position_permutation()
    for c in stable:
        assert tuple(c[pp.index(j)] for j in range(len(c))) == c
    # non-block-constant entries are excluded
    for c in s.entries:
        blocks_constant = all(
            len({c[j] for j in blk}) == 1 for blk in lifted.blocks)
        assert (c in stable) == blocks_constant


def test_canonical_slice_cache_round_trip(tmp_path):
    b2, _ = builtin("B2")
    _, h = longest_element(b2)
    cache = SliceCache(str(tmp_path / "c"))
    s1 = canonical_slice((2, 2), h, cache=cache)
    cache2 = SliceCache(str(tmp_path / "c"))
    s2 = canonical_slice((2, 2), h, cache=cache2)
    assert s1.entries == s2.entries
    assert len(cache2.entries()) == 1
    cache2.clear()
    cache2.clear()  # idempotent
    assert cache2.entries() == []
