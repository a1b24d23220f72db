"""Divided-power words in the generators f_i and the contraction form.

Elements are finite linear combinations of words whose letters are divided
powers f_i^(a); adjacent equal letters merge eagerly via
f_i^(a) f_i^(b) = [a+b choose a]_{q_i} f_i^(a+b), but no further rewriting is
performed.  Equality in the quantized enveloping algebra is decided by the
contraction bilinear form: its radical on the free algebra is exactly the
ideal of the defining relations, so an element maps to zero precisely when it
pairs to zero with every word of its weight (:func:`is_zero`).

Form convention, pinned by the oracle tests in tests/test_freealg.py:

    (1, 1) = 1,   (f_i x, y) = (1 - q_i^2)^{-1} (x, delta_i(y)),

where delta_i is the left q-derivation with delta_i(f_j u) = [i = j] u +
q^{-(a_i, a_j)} f_j delta_i(u).  This gives the diagonal values
(f_i^(n), f_i^(n)) = prod_{d=1..n} (1 - q_i^{2d})^{-1} and makes the ordered
products attached to reduced words an orthogonal family.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .cartan import CartanDatum, DiagramAut
from .errors import QfoldError, RingMismatchError
from .qarith import (
    LaurentPoly, RationalFn, ladd, lmono, lnorm, q_binomial, q_factorial,
)

# a word is a tuple of (letter index, positive power), adjacent indices distinct
Word = tuple[tuple[int, int], ...]


def _binom(datum: CartanDatum, char: int, i: int, a: int, b: int) -> RationalFn:
    ql = q_binomial(a + b, a, datum.d(i))
    if char:
        from .qarith import reduce_mod
        ql = reduce_mod(ql, char)
    return RationalFn(ql)


def _word_concat(datum: CartanDatum, char: int, w1: Word, w2: Word
                 ) -> tuple[Word, RationalFn]:
    if not w1:
        return w2, RationalFn.one(char)
    if not w2:
        return w1, RationalFn.one(char)
    (i, a), (j, b) = w1[-1], w2[0]
    if i != j:
        return w1 + w2, RationalFn.one(char)
    return w1[:-1] + ((i, a + b),) + w2[1:], _binom(datum, char, i, a, b)


@dataclass
class FreeElt:
    datum: CartanDatum
    char: int
    terms: dict  # Word -> RationalFn, no zero values

    # -- construction helpers -------------------------------------------------
    @staticmethod
    def zero(datum: CartanDatum, char: int = 0) -> "FreeElt":
        return FreeElt(datum, char, {})

    @staticmethod
    def one(datum: CartanDatum, char: int = 0) -> "FreeElt":
        return FreeElt(datum, char, {(): RationalFn.one(char)})

    @staticmethod
    def scalar(datum: CartanDatum, coeff, char: int = 0) -> "FreeElt":
        c = RationalFn.of(coeff, char)
        return FreeElt(datum, char, {(): c} if not c.is_zero() else {})

    def _check(self, other: "FreeElt") -> None:
        if self.datum != other.datum:
            raise RingMismatchError("elements over different Cartan data")
        if self.char != other.char:
            raise RingMismatchError("elements over different coefficient rings")

    # -- linear structure ------------------------------------------------------
    def __add__(self, other: "FreeElt") -> "FreeElt":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return FreeElt(self.datum, self.char, out)

    def __neg__(self) -> "FreeElt":
        return FreeElt(self.datum, self.char,
                       {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "FreeElt") -> "FreeElt":
        return self + (-other)

    def scale(self, coeff) -> "FreeElt":
        c = RationalFn.of(coeff, self.char)
        if c.is_zero():
            return FreeElt.zero(self.datum, self.char)
        return FreeElt(self.datum, self.char,
                       {w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, FreeElt):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int) -> "FreeElt":
        if n < 0:
            raise QfoldError("negative powers are undefined here")
        out = FreeElt.one(self.datum, self.char)
        for _ in range(n):
            out = multiply(out, self)
        return out

    def __eq__(self, other):
        """Literal equality of normal forms (not equality in the quotient)."""
        if not isinstance(other, FreeElt):
            return NotImplemented
        return (self.datum == other.datum and self.char == other.char
                and self.terms == other.terms)

    def is_zero_literal(self) -> bool:
        return not self.terms

    # -- grading ---------------------------------------------------------------
    def weight_components(self) -> dict:
        out: dict = {}
        for w, c in self.terms.items():
            mu = word_weight(self.datum, w)
            out.setdefault(mu, {})[w] = c
        return {mu: FreeElt(self.datum, self.char, t) for mu, t in out.items()}

    def weight(self) -> tuple[int, ...]:
        comps = self.weight_components()
        if len(comps) > 1:
            raise QfoldError("element is not homogeneous")
        if not comps:
            return (0,) * self.datum.rank
        return next(iter(comps))

    def height(self) -> int:
        return sum(self.weight())

    def __str__(self):
        if not self.terms:
            return "0"
        labs = self.datum.labels
        parts = []
        for w in sorted(self.terms):
            body = "*".join(
                f"f{labs[i]}" + (f"^({a})" if a > 1 else "") for i, a in w) or "1"
            c = self.terms[w]
            if c.is_one():
                parts.append(body)
            else:
                parts.append(f"({c})*{body}" if body != "1" else f"({c})")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> dict:
        labs = self.datum.labels
        return {"terms": [
            {"word": [[labs[i], a] for i, a in w], "coeff": str(self.terms[w])}
            for w in sorted(self.terms)]}


def word_weight(datum: CartanDatum, w: Word) -> tuple[int, ...]:
    mu = [0] * datum.rank
    for i, a in w:
        mu[i] += a
    return tuple(mu)


def gen(datum: CartanDatum, label_or_index, power: int = 1, char: int = 0) -> FreeElt:
    """The divided-power generator f_i^(power)."""
    i = (label_or_index if isinstance(label_or_index, int)
         else datum.index(str(label_or_index)))
    if power < 0:
        raise QfoldError("divided power must be nonnegative")
    if power == 0:
        return FreeElt.one(datum, char)
    return FreeElt(datum, char, {((i, power),): RationalFn.one(char)})


def generators(datum: CartanDatum, char: int = 0) -> dict:
    return {lab: gen(datum, lab, 1, char) for lab in datum.labels}


def word_elt(datum: CartanDatum, letters, char: int = 0, coeff=1) -> FreeElt:
    """Product of divided powers given as (label, power) pairs or bare labels."""
    out = FreeElt.scalar(datum, RationalFn.of(coeff, char), char)
    for item in letters:
        lab, a = item if isinstance(item, tuple) else (item, 1)
        out = multiply(out, gen(datum, lab, a, char))
    return out


def multiply(x: FreeElt, y: FreeElt) -> FreeElt:
    x._check(y)
    out: dict = {}
    datum, char = x.datum, x.char
    for w1, c1 in x.terms.items():
        for w2, c2 in y.terms.items():
            w, factor = _word_concat(datum, char, w1, w2)
            c = c1 * c2
            if not factor.is_one():
                c = c * factor
            s = out.get(w)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
    return FreeElt(datum, char, out)


def serre_element(datum: CartanDatum, i, j, char: int = 0) -> FreeElt:
    """The defining relation element for a pair of distinct vertices."""
    ii = i if isinstance(i, int) else datum.index(str(i))
    jj = j if isinstance(j, int) else datum.index(str(j))
    if ii == jj:
        raise QfoldError("serre_element needs two distinct vertices")
    n = 1 - datum.a(ii, jj)
    out = FreeElt.zero(datum, char)
    fj = gen(datum, jj, 1, char)
    for k in range(n + 1):
        t = multiply(multiply(gen(datum, ii, k, char), fj),
                     gen(datum, ii, n - k, char))
        out = out + (t if k % 2 == 0 else -t)
    return out


def bar_elt(x: FreeElt) -> FreeElt:
    """Bar involution: fixes every divided-power word, conjugates scalars."""
    return FreeElt(x.datum, x.char, {w: c.bar() for w, c in x.terms.items()})


def star_elt(x: FreeElt) -> FreeElt:
    """Word-reversing anti-automorphism."""
    return FreeElt(x.datum, x.char,
                   {tuple(reversed(w)): c for w, c in x.terms.items()})


def sigma_elt(aut: DiagramAut, x: FreeElt) -> FreeElt:
    if aut.datum != x.datum:
        raise RingMismatchError("automorphism over a different datum")
    return FreeElt(x.datum, x.char,
                   {tuple((aut.apply(i), a) for i, a in w): c
                    for w, c in x.terms.items()})


def reduce_elt(x: FreeElt, eps: int) -> FreeElt:
    """Coefficientwise reduction to GF(eps); requires eps-integral coefficients."""
    out = {}
    for w, c in x.terms.items():
        r = c.reduce_mod(eps)
        if not r.is_zero():
            out[w] = r
    return FreeElt(x.datum, eps, out)


# ---------------------------------------------------------------------------
# the contraction form

@lru_cache(maxsize=None)
def _gen_pairing(datum: CartanDatum, char: int, i: int) -> RationalFn:
    one = LaurentPoly.one(char)
    return RationalFn(one, one - LaurentPoly.q_power(2 * datum.d(i), char))


@lru_cache(maxsize=None)
def _weight_scalar(datum: CartanDatum, char: int, mu: tuple[int, ...]) -> RationalFn:
    out = RationalFn.one(char)
    for i, m in enumerate(mu):
        for _ in range(m):
            out = out * _gen_pairing(datum, char, i)
    return out


def plainify(x: FreeElt) -> dict:
    """Expand divided powers: map plain letter tuple -> RationalFn coefficient."""
    out = {}
    for w, c in x.terms.items():
        plain = []
        for i, a in w:
            plain.extend([i] * a)
            if a > 1:
                fct = q_factorial(a, x.datum.d(i))
                if x.char:
                    from .qarith import reduce_mod
                    fct = reduce_mod(fct, x.char)
                c = c / fct
        out[tuple(plain)] = c
    return out


def _clear_denominators(datum: CartanDatum, char: int, plain: dict
                        ) -> tuple[dict, RationalFn]:
    """Scale an element to Laurent coefficients; returns (raw terms, 1/scale)."""
    from .qarith import poly_lcm
    lcm = LaurentPoly.one(char)
    for c in plain.values():
        if not c.den.is_one():
            lcm = poly_lcm(lcm, c.den)
    inv = RationalFn(LaurentPoly.one(char), lcm)
    raw = {}
    for w, c in plain.items():
        cc = c * lcm
        raw[w] = dict(cc.laurent().terms)
    return raw, inv


def _delta_raw(datum: CartanDatum, char: int, i: int, y: dict) -> dict:
    """Left q-derivation on raw plain-word terms (word -> exponent dict)."""
    form_row = datum.form[i]
    out: dict = {}
    for w, cf in y.items():
        s = 0
        for pos, letter in enumerate(w):
            if letter == i:
                nw = w[:pos] + w[pos + 1:]
                shifted = lmono(cf, -s, 1, char)
                prev = out.get(nw)
                out[nw] = shifted if prev is None else ladd(prev, shifted, char)
            s += form_row[letter]
    return {w: cf for w, cf in out.items() if cf}


class FormSession:
    """Shared state for pairing many plain words against one fixed element.

    Caches the q-derivation chains by word prefix, so words with a common
    prefix (all the basis words of one weight, say) share the bulk of the
    work.  Values returned by :meth:`word_value` omit the weight scalar and
    the denominator cleared from the fixed element; :func:`form_value`
    reassembles those.
    """

    def __init__(self, datum: CartanDatum, char: int, y_plain_raw: dict):
        self.datum = datum
        self.char = char
        self._chain: dict = {(): y_plain_raw}

    def word_value(self, w: tuple[int, ...]) -> dict:
        chain = self._chain
        best = len(w)
        while best and w[:best] not in chain:
            best -= 1
        y = chain[w[:best]]
        for k in range(best, len(w)):
            if not y:
                return {}
            y = _delta_raw(self.datum, self.char, w[k], y)
            chain[w[: k + 1]] = y
        return y.get((), {})


def form_value(x: FreeElt, y: FreeElt) -> RationalFn:
    """The contraction form; zero across distinct weights."""
    x._check(y)
    datum, char = x.datum, x.char
    xs = x.weight_components()
    ys = y.weight_components()
    total = RationalFn.zero(char)
    for mu, xc in xs.items():
        yc = ys.get(mu)
        if yc is None:
            continue
        xp = plainify(xc)
        yraw, yscale = _clear_denominators(datum, char, plainify(yc))
        session = FormSession(datum, char, yraw)
        acc = RationalFn.zero(char)
        for w in sorted(xp):
            val = session.word_value(w)
            if val:
                acc = acc + xp[w] * RationalFn(LaurentPoly(val, char))
        if not acc.is_zero():
            total = total + acc * yscale * _weight_scalar(datum, char, mu)
    return total


def is_zero(x: FreeElt) -> bool:
    """Membership in the radical of the form, i.e. the element maps to zero.

    Pairs the element against every plain word of its weight; those words span
    the weight space of the free algebra, so vanishing against all of them is
    exactly membership in the radical (the defining-relations ideal).
    """
    if not x.terms:
        return True
    datum, char = x.datum, x.char
    for mu, comp in x.weight_components().items():
        raw, _ = _clear_denominators(datum, char, plainify(comp))
        if not _orthogonal_to_all_words(datum, char, list(mu), raw):
            return False
    return True


def _orthogonal_to_all_words(datum: CartanDatum, char: int,
                             counts: list[int], y: dict) -> bool:
    if not y:
        return True
    if not any(counts):
        return False  # a nonzero scalar survived at the bottom of a chain
    for i in range(datum.rank):
        if counts[i]:
            yi = _delta_raw(datum, char, i, y)
            if yi:
                counts[i] -= 1
                ok = _orthogonal_to_all_words(datum, char, counts, yi)
                counts[i] += 1
                if not ok:
                    return False
    return True


def equal_mod_relations(x: FreeElt, y: FreeElt) -> bool:
    return is_zero(x - y)
