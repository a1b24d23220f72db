"""Weyl-group machinery for finite-type Cartan data.

Group elements are represented by their permutation action on the finite set
of roots (computed once per datum), so reducedness checks reduce to counting
positive roots sent negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .cartan import CartanDatum, DiagramAut, FoldedDatum
from .errors import NotFiniteTypeError, NotReducedError, QfoldError

_ROOT_BOUND = 1000


def reflect(datum: CartanDatum, i: int, coords: tuple[int, ...]) -> tuple[int, ...]:
    """Simple reflection acting on root-lattice coordinates."""
    c = sum(coords[j] * datum.a(i, j) for j in range(datum.rank) if coords[j])
    out = list(coords)
    out[i] -= c
    return tuple(out)


def pair_vectors(datum: CartanDatum, x: tuple[int, ...], y: tuple[int, ...]) -> int:
    return sum(x[i] * datum.form[i][j] * y[j]
               for i in range(datum.rank) for j in range(datum.rank)
               if x[i] and y[j])


@dataclass(frozen=True)
class RootSystem:
    datum: CartanDatum
    roots: tuple[tuple[int, ...], ...]        # positive roots then their negatives
    index: dict
    simple_perm: tuple[tuple[int, ...], ...]  # action of each s_i on root indices

    @property
    def n_positive(self) -> int:
        return len(self.roots) // 2

    def is_positive(self, idx: int) -> bool:
        return idx < self.n_positive

    def act(self, word: tuple[int, ...], idx: int) -> int:
        # word acts as s_{i_1} ... s_{i_k} applied right-to-left
        for i in reversed(word):
            idx = self.simple_perm[i][idx]
        return idx


@lru_cache(maxsize=None)
def root_system(datum: CartanDatum) -> RootSystem:
    n = datum.rank
    simple = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    pos: set[tuple[int, ...]] = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for r in frontier:
            for i in range(n):
                s = reflect(datum, i, r)
                if any(c > 0 for c in s) and s not in pos:
                    pos.add(s)
                    nxt.append(s)
        if len(pos) > _ROOT_BOUND:
            raise NotFiniteTypeError(
                "root enumeration exceeded bound; datum is not finite type")
        frontier = nxt
    pos_sorted = sorted(pos, key=lambda r: (sum(r), r))
    roots = tuple(pos_sorted) + tuple(tuple(-c for c in r) for r in pos_sorted)
    index = {r: k for k, r in enumerate(roots)}
    perms = []
    for i in range(n):
        perms.append(tuple(index[reflect(datum, i, r)] for r in roots))
    return RootSystem(datum, roots, index, tuple(perms))


def word_permutation(datum: CartanDatum, letters: tuple[int, ...]) -> tuple[int, ...]:
    rs = root_system(datum)
    size = len(rs.roots)
    perm = list(range(size))
    for i in reversed(letters):
        sp = rs.simple_perm[i]
        perm = [perm[sp[k]] for k in range(size)]
    # perm[k] = image of root k under s_{i_1} ... s_{i_nu}
    return tuple(perm)


def word_length(datum: CartanDatum, letters: tuple[int, ...]) -> int:
    rs = root_system(datum)
    perm = word_permutation(datum, letters)
    npos = rs.n_positive
    return sum(1 for k in range(npos) if perm[k] >= npos)


@dataclass(frozen=True)
class ReducedWord:
    datum: CartanDatum
    letters: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= i < self.datum.rank for i in self.letters):
            raise QfoldError("letter index out of range")
        if word_length(self.datum, self.letters) != len(self.letters):
            raise NotReducedError(f"word {self.labels} is not reduced")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.datum.labels[i] for i in self.letters)

    def __len__(self):
        return len(self.letters)

    @staticmethod
    def from_labels(datum: CartanDatum, labels) -> "ReducedWord":
        return ReducedWord(datum, tuple(datum.index(str(x)) for x in labels))


def is_reduced(datum: CartanDatum, letters) -> bool:
    letters = tuple(letters)
    return word_length(datum, letters) == len(letters)


def longest_element(datum: CartanDatum) -> tuple[int, ReducedWord]:
    """Number of positive roots and one reduced word for the longest element."""
    rs = root_system(datum)
    nu = rs.n_positive
    word: list[int] = []
    perm = list(range(len(rs.roots)))
    for _ in range(nu):
        for i in range(datum.rank):
            # appending s_i lengthens the word iff current image of alpha_i stays positive
            img = perm[rs.index[tuple(1 if j == i else 0 for j in range(datum.rank))]]
            if img < nu:
                word.append(i)
                sp = rs.simple_perm[i]
                perm = [perm[sp[k]] for k in range(len(perm))]
                break
        else:
            raise NotFiniteTypeError("longest-element search stalled")
    return nu, ReducedWord(datum, tuple(word))


def beta_sequence(word: ReducedWord) -> tuple[tuple[int, ...], ...]:
    """Roots s_{i_1}...s_{i_{k-1}}(alpha_{i_k}); distinct positive roots."""
    datum = word.datum
    out = []
    for k, i in enumerate(word.letters):
        v = tuple(1 if j == i else 0 for j in range(datum.rank))
        for m in range(k - 1, -1, -1):
            v = reflect(datum, word.letters[m], v)
        out.append(v)
    return tuple(out)


def reduced_words(datum: CartanDatum, limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """All reduced words for the longest element, in a fixed deterministic order."""
    rs = root_system(datum)
    nu = rs.n_positive
    size = len(rs.roots)
    alpha_idx = [rs.index[tuple(1 if j == i else 0 for j in range(datum.rank))]
                 for i in range(datum.rank)]
    w0 = list(range(size))
    for k in range(nu):
        w0[k], w0[k + nu] = k + nu, k
    count = 0

    def gen(perm: list[int], length: int) -> Iterator[tuple[int, ...]]:
        if length == 0:
            yield ()
            return
        for i in range(datum.rank):
            if perm[alpha_idx[i]] >= nu:  # right descent: w(alpha_i) negative
                sp = rs.simple_perm[i]
                nxt = [perm[sp[k]] for k in range(size)]
                for tail in gen(nxt, length - 1):
                    yield tail + (i,)

    for w in gen(w0, nu):
        yield w
        count += 1
        if limit is not None and count >= limit:
            return


@dataclass(frozen=True)
class LiftedWord:
    """A reduced word over the source datum obtained from one over the quotient.

    Each quotient letter expands into the block of its orbit members, taken in
    a fixed order (they commute), and block k occupies ``blocks[k]`` of the
    resulting word.
    """
    folding: FoldedDatum
    ul_word: ReducedWord
    word: ReducedWord
    blocks: tuple[tuple[int, ...], ...]

    def block_of_position(self, j: int) -> int:
        for k, blk in enumerate(self.blocks):
            if j in blk:
                return k
        raise QfoldError("position out of range")

    def position_permutation(self) -> tuple[int, ...]:
        """Position map induced by the automorphism inside each block."""
        aut = self.folding.aut
        letters = self.word.letters
        out = [0] * len(letters)
        for blk in self.blocks:
            for j in blk:
                target = aut.apply(letters[j])
                for j2 in blk:
                    if letters[j2] == target:
                        out[j] = j2
                        break
        return tuple(out)


def lift_word(folding: FoldedDatum, ul_word: ReducedWord,
              orbit_order: dict | None = None) -> LiftedWord:
    """Expand a reduced word over the quotient into one over the source.

    Orbit members commute, so any order inside a block is valid; the default
    is label order, fixed for determinism.
    """
    if ul_word.datum != folding.quotient:
        raise QfoldError("word is not over the folded datum")
    letters: list[int] = []
    blocks: list[tuple[int, ...]] = []
    for eta in ul_word.letters:
        members = list(folding.orbits[eta])
        if orbit_order and eta in orbit_order:
            members = [folding.source.index(str(x)) for x in orbit_order[eta]]
            if sorted(members) != sorted(folding.orbits[eta]):
                raise QfoldError("orbit_order does not enumerate the orbit")
        start = len(letters)
        letters.extend(members)
        blocks.append(tuple(range(start, len(letters))))
    word = ReducedWord(folding.source, tuple(letters))  # validates reducedness
    return LiftedWord(folding, ul_word, word, tuple(blocks))


def sigma_on_word(aut: DiagramAut, letters) -> tuple[int, ...]:
    return tuple(aut.apply(i) for i in letters)
