"""Bar-involution matrices and the triangular construction of canonical bases.

For one weight space and one reduced word, the bar images of the ordered
monomials L_c expand unitriangularly (with Laurent entries) against the lex
order on exponent vectors; the triangular algorithm then produces the unique
bar-fixed family b_c = L_c + sum_{d > c} a_d L_d with a_d in q Z[q].
Slices are cached to disk as JSON lines because the folding comparisons
re-read both sides of every weight repeatedly.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

from .cartan import CartanDatum
from .errors import ExpansionError, QfoldError, SkewError, TriangularityError
from .freealg import FreeElt, bar_elt, form_value, is_zero
from .qarith import LaurentPoly, RationalFn
from .pbw import PBWElt, enumerate_c, pbw_expand, pbw_monomial, sigma_on_pbw
from .weyl import LiftedWord, ReducedWord


def skew_solve(s: LaurentPoly) -> LaurentPoly:
    """The unique a in q Z[q] with a - bar(a) = s, for bar-antisymmetric s."""
    if s.bar() != -s:
        raise SkewError(f"{s} is not bar-antisymmetric")
    return LaurentPoly({e: c for e, c in s.terms.items() if e > 0}, s.char)


def bar_matrix(weight: tuple[int, ...], h: ReducedWord, char: int = 0) -> dict:
    """Rows of the bar action on the monomial family: c -> {d -> LaurentPoly}.

    Unitriangular: the row of c is supported on d >= c with diagonal 1, and
    every entry is a Laurent polynomial.
    """
    cs = enumerate_c(weight, h)
    rows: dict = {}
    for c in cs:
        expansion = pbw_expand(bar_elt(pbw_monomial(c, h, char)), h)
        row = {}
        for d, a in expansion.coords.items():
            if not a.is_laurent:
                raise ExpansionError(
                    f"bar image of {c} has non-Laurent coordinate {a} at {d}")
            row[d] = a.laurent()
        if row.get(c) != LaurentPoly.one(char):
            raise TriangularityError(f"bar matrix diagonal at {c} is not 1")
        for d in row:
            if d < c:
                raise TriangularityError(
                    f"bar image of {c} touches smaller index {d}")
        rows[c] = row
    return rows


@dataclass
class CanonicalBasisSlice:
    datum: CartanDatum
    h: ReducedWord
    weight: tuple[int, ...]
    char: int
    entries: dict  # c -> {d -> LaurentPoly}, entry[c][c] == 1

    def element(self, c: tuple[int, ...]) -> PBWElt:
        return PBWElt(self.h, self.weight, self.char,
                      {d: RationalFn(a) for d, a in self.entries[c].items()})

    def materialize(self, c: tuple[int, ...]) -> FreeElt:
        return self.element(c).materialize()

    def __iter__(self):
        return iter(sorted(self.entries))

    def to_json(self) -> dict:
        return {
            "weight": list(self.weight),
            "char": self.char,
            "h": list(self.h.labels),
            "entries": [
                {"c": list(c),
                 "coords": [[list(d), a.to_json()["terms"]]
                            for d, a in sorted(self.entries[c].items())]}
                for c in sorted(self.entries)],
        }

    @staticmethod
    def from_json(obj: dict, datum: CartanDatum, h: ReducedWord
                  ) -> "CanonicalBasisSlice":
        char = int(obj["char"])
        entries = {}
        for row in obj["entries"]:
            c = tuple(row["c"])
            entries[c] = {
                tuple(d): LaurentPoly.from_json({"terms": terms}, char)
                for d, terms in row["coords"]}
        return CanonicalBasisSlice(datum, h, tuple(obj["weight"]), char, entries)


def canonical_slice(weight: tuple[int, ...], h: ReducedWord, char: int = 0,
                    cache: "SliceCache | None" = None) -> CanonicalBasisSlice:
    """Bar-fixed unitriangular basis of one weight space over one word."""
    if cache is not None:
        hit = cache.get(h, weight, char)
        if hit is not None:
            return hit
    rows = bar_matrix(weight, h, char)
    cs = enumerate_c(weight, h)  # descending lex: corrections come earlier
    built: dict = {}
    for c in cs:
        defect = {d: a for d, a in rows[c].items() if d != c}
        coeffs: dict = {}
        # peel the defect against already-built entries, smallest index first
        while defect:
            d0 = min(defect)
            beta = defect.pop(d0)
            if d0 <= c or d0 not in built:
                raise TriangularityError(
                    f"defect of {c} escapes the built range at {d0}")
            coeffs[d0] = beta
            for d, a in built[d0].items():
                if d == d0:
                    continue
                s = defect.get(d, LaurentPoly.zero(char)) - beta * a
                if s.is_zero():
                    defect.pop(d, None)
                else:
                    defect[d] = s
        entry = {c: LaurentPoly.one(char)}
        for d0, beta in coeffs.items():
            p = skew_solve(beta)
            if p.is_zero():
                continue
            for d, a in built[d0].items():
                s = entry.get(d, LaurentPoly.zero(char)) + p * a
                if s.is_zero():
                    entry.pop(d, None)
                else:
                    entry[d] = s
        for d, a in entry.items():
            if d == c:
                continue
            if not a.in_q_only():
                raise TriangularityError(
                    f"correction {a} at {d} is not in qZ[q] (entry {c})")
        built[c] = entry
    out = CanonicalBasisSlice(h.datum, h, weight, char, built)
    if cache is not None:
        cache.put(out)
    return out


def compare_slices(h: ReducedWord, h2: ReducedWord, weight: tuple[int, ...],
                   char: int = 0, cache: "SliceCache | None" = None) -> dict:
    """Match the two slices elementwise; returns {c -> (c2, sign)}.

    Every element of the first slice is re-expanded in the monomial family of
    the second word; its lex-least coordinate index identifies the matching
    element, and the full coordinate vectors must agree up to the recorded
    sign (+1 or -1).
    """
    s1 = canonical_slice(weight, h, char, cache)
    s2 = canonical_slice(weight, h2, char, cache)
    matching: dict = {}
    used = set()
    for c in s1.entries:
        x = s1.materialize(c)
        coords = pbw_expand(x, h2).coords
        if not coords:
            raise ExpansionError(f"element {c} vanished when re-expanded")
        c2 = min(coords)
        lead = coords[c2]
        if lead.is_laurent and lead.laurent() == LaurentPoly.one(char):
            sign = 1
        elif lead.is_laurent and lead.laurent() == -LaurentPoly.one(char):
            sign = -1
        else:
            raise ExpansionError(
                f"leading coordinate {lead} of {c} under the second word "
                "is not a sign")
        target = s2.element(c2).coords
        got = {d: (a if sign == 1 else -a) for d, a in coords.items()}
        if got != target:
            raise ExpansionError(
                f"slices disagree beyond a sign at {c} -> {c2}")
        if c2 in used:
            raise ExpansionError("matching is not injective")
        used.add(c2)
        matching[c] = (c2, sign)
    if len(used) != len(s2.entries):
        raise ExpansionError("matching is not onto")
    return matching


def sigma_stable_elements(slice_: CanonicalBasisSlice, lifted: LiftedWord) -> dict:
    """Entries fixed by the automorphism; keys are the block-constant indices."""
    if slice_.h != lifted.word:
        raise QfoldError("slice is not over the lifted word")
    pp = lifted.position_permutation()
    out = {}
    for c in slice_.entries:
        cc = [0] * len(c)
        for j, v in enumerate(c):
            cc[pp[j]] = v
        if tuple(cc) == c:
            out[c] = slice_.element(c)
    return out


def almost_orthonormal(slice_: CanonicalBasisSlice, order: int = 5) -> bool:
    """Pairwise form values lie in delta_{bb'} + qZ[[q]] up to the given order."""
    elems = {c: slice_.materialize(c) for c in slice_.entries}
    cs = sorted(elems)
    for i, c in enumerate(cs):
        for c2 in cs[i:]:
            v = form_value(elems[c], elems[c2])
            if v.is_zero():
                continue
            lo = min(v.num.min_exp(), 0)  # series cannot start below num's valuation
            ser = v.series(lo, order)
            if any(e < 0 and coeff for e, coeff in ser.items()):
                return False
            const = ser.get(0, 0)
            if (const != 1) if c == c2 else (const != 0):
                return False
    return True


class SliceCache:
    """JSON-lines store of computed slices, one slice per line."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self.path = os.path.join(directory, "slices.jsonl")
        self._mem: dict = {}
        self._load()

    @staticmethod
    def _key(h: ReducedWord, weight, char) -> str:
        datum = h.datum
        raw = json.dumps([list(datum.labels), [list(r) for r in datum.form],
                          list(h.letters), list(weight), char])
        return hashlib.sha1(raw.encode()).hexdigest()

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path) as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    self._mem[obj["key"]] = obj
    def get(self, h: ReducedWord, weight, char) -> CanonicalBasisSlice | None:
        obj = self._mem.get(self._key(h, weight, char))
        if obj is None:
            return None
        return CanonicalBasisSlice.from_json(obj["slice"], h.datum, h)

    def put(self, slice_: CanonicalBasisSlice) -> None:
        key = self._key(slice_.h, slice_.weight, slice_.char)
        if key in self._mem:
            return
        obj = {"key": key,
               "datum": slice_.datum.to_json(),
               "slice": slice_.to_json()}
        self._mem[key] = obj
        with open(self.path, "a") as fh:
            fh.write(json.dumps(obj) + "\n")

    def entries(self) -> list[dict]:
        return [{"key": obj["key"],
                 "labels": obj["datum"]["labels"],
                 "h": obj["slice"]["h"],
                 "weight": obj["slice"]["weight"],
                 "char": obj["slice"]["char"]}
                for obj in self._mem.values()]

    def clear(self) -> None:
        self._mem = {}
        if os.path.exists(self.path):
            os.remove(self.path)
