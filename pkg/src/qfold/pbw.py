"""Braid operators, root vectors, and ordered-monomial (PBW) bases.

The braid operator attached to a vertex i acts on the whole quantized
algebra, so applying it to an element of the negative part passes through an
ambient computation: words are lifted to mixed F/K/E words, the generator
images are substituted letterwise, and the result is normal-ordered
(F-letters, then K-letters, then E-letters) using only

    E_i F_j = F_j E_i                                   (i != j)
    E_i F_i = F_i E_i + (K_i - K_i^{-1}) / (q_i - q_i^{-1})
    K_mu F_j = q^{-(mu, a_j)} F_j K_mu,   K_mu E_j = q^{(mu, a_j)} E_j K_mu

Terms with a nonempty E-part or a nontrivial K-part are then discarded; by
triangular decomposition their F-coordinates vanish whenever the image lies
in the negative part, and that is verified post hoc (groupwise is_zero) so a
convention bug raises instead of silently corrupting results.

Generator images (the convention reproducing T_2(f_1) = f_1 f_2 - q f_2 f_1):

    T_i(f_j) = sum_{r+s=-a_ij} (-1)^r q_i^r f_i^(r) f_j f_i^(s)   (j != i)
    T_i(f_i) = - K_i^{-1} E_i
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .cartan import CartanDatum
from .errors import BraidImageError, ExpansionError, QfoldError
from .freealg import (
    FreeElt, form_value, gen, is_zero, multiply, plainify, word_weight,
)
from .qarith import LaurentPoly, RationalFn, q_factorial, reduce_mod
from .weyl import LiftedWord, ReducedWord, beta_sequence

_ZKV = ()  # sentinel not used; kvecs are tuples sized by rank


def _qp(n: int, char: int) -> RationalFn:
    return RationalFn.q_power(n, char)


def _fct(datum: CartanDatum, char: int, i: int, a: int) -> RationalFn:
    f = q_factorial(a, datum.d(i))
    return RationalFn(reduce_mod(f, char) if char else f)


@lru_cache(maxsize=None)
def braid_gen_image(datum: CartanDatum, char: int, i: int, j: int) -> FreeElt:
    """T_i(f_j) for j != i; lands in the negative part."""
    if i == j:
        raise QfoldError("the i = i image is not an element of the negative part")
    n = -datum.a(i, j)
    out = FreeElt.zero(datum, char)
    fj = gen(datum, j, 1, char)
    for r in range(n + 1):
        t = multiply(multiply(gen(datum, i, r, char), fj),
                     gen(datum, i, n - r, char))
        t = t.scale(_qp(datum.d(i) * r, char))
        out = out + (t if r % 2 == 0 else -t)
    return out


def _pair_kv(datum: CartanDatum, kv: tuple[int, ...], counts) -> int:
    """(mu, weight) for a K-exponent vector mu and a letter multiset."""
    total = 0
    for a, m in enumerate(kv):
        if m:
            row = datum.form[a]
            total += m * sum(row[j] * c for j, c in counts.items())
    return total


def _counts(word: tuple[int, ...]) -> dict:
    out: dict = {}
    for x in word:
        out[x] = out.get(x, 0) + 1
    return out


@lru_cache(maxsize=None)
def _one_E_through(datum: CartanDatum, char: int, e: int, fw: tuple[int, ...]):
    """E_e times a plain F-word: list of (fword, kvec_delta_at_e, q-exp, denom?).

    Entries are (fw', dk, exp, survived) where dk in {0, +1, -1} is the power
    of K_e produced, exp the q-power exponent, and survived marks the term
    where E_e passed through completely.  Terms with dk != 0 carry an implicit
    factor 1/(q_e - q_e^{-1}).
    """
    out = [(fw, 0, 0, True)]
    row = datum.form[e]
    suffix = 0
    # walk from the right so the suffix pairing accumulates naturally
    for pos in range(len(fw) - 1, -1, -1):
        if fw[pos] == e:
            nfw = fw[:pos] + fw[pos + 1:]
            out.append((nfw, +1, -suffix, False))
            out.append((nfw, -1, +suffix, False))
        suffix += row[fw[pos]]
    return tuple(out)


@lru_cache(maxsize=None)
def _E_word_times_F(datum: CartanDatum, char: int, ew: tuple[int, ...],
                    fw: tuple[int, ...]):
    """Normal-order (E-word)(F-word): dict (fw', kv, ew') -> RationalFn."""
    rank = datum.rank
    zero_kv = (0,) * rank
    if not ew or not fw:
        return {(fw, zero_kv, ew): RationalFn.one(char)}
    e, rest = ew[-1], ew[:-1]
    qe = LaurentPoly.q_power(datum.d(e), char)
    denom = RationalFn(LaurentPoly.one(char), qe - qe.bar())
    out: dict = {}
    for fw1, dk, exp, survived in _one_E_through(datum, char, e, fw):
        coeff0 = _qp(exp, char)
        if not survived:
            coeff0 = coeff0 * denom * (1 if dk > 0 else -1)
        for (fw2, kv2, ew2), c2 in _E_word_times_F(datum, char, rest, fw1).items():
            # K_e^{dk} moves left across ew2
            shift = -dk * _pair_kv(datum, tuple(1 if t == e else 0 for t in range(rank)),
                                   _counts(ew2)) if dk else 0
            kv = list(kv2)
            if dk:
                kv[e] += dk
            ewf = ew2 + ((e,) if survived else ())
            key = (fw2, tuple(kv), ewf)
            c = coeff0 * c2 * (_qp(shift, char) if shift else 1)
            prev = out.get(key)
            c = c if prev is None else prev + c
            if c.is_zero():
                out.pop(key, None)
            else:
                out[key] = c
    return out


def _mixed_mul(datum: CartanDatum, char: int, A: dict, B: dict) -> dict:
    rank = datum.rank
    out: dict = {}
    for (f1, k1, e1), c1 in A.items():
        for (f2, k2, e2), c2 in B.items():
            c12 = c1 * c2
            for (fm, kv, em), cm in _E_word_times_F(datum, char, e1, f2).items():
                exp = 0
                if any(k1):
                    exp += -_pair_kv(datum, k1, _counts(fm))
                if any(k2):
                    exp += -_pair_kv(datum, k2, _counts(em))
                key = (f1 + fm,
                       tuple(a + b + c for a, b, c in zip(k1, kv, k2)),
                       em + e2)
                c = c12 * cm * (_qp(exp, char) if exp else 1)
                prev = out.get(key)
                c = c if prev is None else prev + c
                if c.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = c
    return out


def _letter_image(datum: CartanDatum, char: int, i: int, j: int, a: int) -> dict:
    rank = datum.rank
    if j != i:
        base = braid_gen_image(datum, char, i, j)
        img = base ** a if a > 1 else base
        img = img.scale(RationalFn.one(char) / _fct(datum, char, j, a))
        zero_kv = (0,) * rank
        return {(pw, zero_kv, ()): c for pw, c in plainify(img).items()}
    di = datum.d(i)
    coeff = _qp(di * a * (a - 1), char) / _fct(datum, char, i, a)
    if a % 2:
        coeff = -coeff
    kv = tuple(-a if t == i else 0 for t in range(rank))
    return {((), kv, (i,) * a): coeff}


def _plain_to_elt(datum: CartanDatum, char: int, terms: dict) -> FreeElt:
    """Regroup plain F-words into divided-power normal form."""
    out = FreeElt.zero(datum, char)
    acc: dict = {}
    for fw, c in terms.items():
        word = []
        scale = RationalFn.one(char)
        pos = 0
        while pos < len(fw):
            run = pos
            while run < len(fw) and fw[run] == fw[pos]:
                run += 1
            n = run - pos
            word.append((fw[pos], n))
            if n > 1:
                scale = scale * _fct(datum, char, fw[pos], n)
            pos = run
        w = tuple(word)
        cc = c * scale
        prev = acc.get(w)
        cc = cc if prev is None else prev + cc
        if cc.is_zero():
            acc.pop(w, None)
        else:
            acc[w] = cc
    out.terms.update(acc)
    return out


def apply_braid(i, x: FreeElt, check_residuals: bool = True) -> FreeElt:
    """Apply the braid operator of one vertex to an element of the negative part.

    Raises BraidImageError when the discarded ambient terms are not actually
    zero, which happens exactly when the image does not lie in the negative
    part (caller error) or a convention is wrong.
    """
    datum, char = x.datum, x.char
    if not isinstance(i, int):
        i = datum.index(str(i))
    rank = datum.rank
    zero_kv = (0,) * rank
    unit = {((), zero_kv, ()): RationalFn.one(char)}
    total: dict = {}
    for w, c in x.terms.items():
        prod = {((), zero_kv, ()): c}
        for (j, a) in w:
            prod = _mixed_mul(datum, char, prod, _letter_image(datum, char, i, j, a))
        for key, v in prod.items():
            prev = total.get(key)
            v = v if prev is None else prev + v
            if v.is_zero():
                total.pop(key, None)
            else:
                total[key] = v
    negative_part: dict = {}
    residual: dict = {}
    for (fw, kv, ew), c in total.items():
        if not ew and not any(kv):
            negative_part[fw] = c
        else:
            residual.setdefault((kv, ew), {})[fw] = c
    if check_residuals:
        for (kv, ew), grp in residual.items():
            if not is_zero(_plain_to_elt(datum, char, grp)):
                raise BraidImageError(
                    f"braid image of {x} under T_{datum.labels[i]} has a nonzero "
                    f"residue at K{list(kv)} E{[datum.labels[t] for t in ew]}")
    return _plain_to_elt(datum, char, negative_part)


def apply_braid_word(letters, x: FreeElt, check_residuals: bool = True) -> FreeElt:
    """T_{i_1}(T_{i_2}(... T_{i_k}(x))) for letters (i_1, ..., i_k)."""
    for i in reversed(tuple(letters)):
        x = apply_braid(i, x, check_residuals)
    return x


# ---------------------------------------------------------------------------
# root vectors and ordered monomials for a reduced word

_rv_cache: dict = {}


def root_vector(h: ReducedWord, k: int, a: int = 1, char: int = 0) -> FreeElt:
    """Divided power of the k-th root vector of h (k is 1-based)."""
    if not 1 <= k <= len(h):
        raise QfoldError(f"root index {k} out of range for word of length {len(h)}")
    key = (h, k, a, char)
    got = _rv_cache.get(key)
    if got is not None:
        return got
    if a == 0:
        out = FreeElt.one(h.datum, char)
    else:
        base_key = (h, k, 1, char)
        base = _rv_cache.get(base_key)
        if base is None:
            base = apply_braid_word(h.letters[: k - 1],
                                    gen(h.datum, h.letters[k - 1], 1, char))
            _rv_cache[base_key] = base
        if a == 1:
            out = base
        else:
            out = (base ** a).scale(
                RationalFn.one(char) / _fct(h.datum, char, h.letters[k - 1], a))
    _rv_cache[key] = out
    return out


def pbw_monomial(c: tuple[int, ...], h: ReducedWord, char: int = 0) -> FreeElt:
    """Ordered product of divided root-vector powers with exponent vector c."""
    if len(c) != len(h):
        raise QfoldError("exponent vector length differs from word length")
    key = (h, tuple(c), char)
    got = _rv_cache.get(key)
    if got is not None:
        return got
    out = FreeElt.one(h.datum, char)
    for k, ck in enumerate(c, start=1):
        if ck:
            out = multiply(out, root_vector(h, k, ck, char))
    _rv_cache[key] = out
    return out


def diagonal_form_value(h: ReducedWord, c: tuple[int, ...], char: int = 0) -> RationalFn:
    """Closed form of (L_c, L_c): product of rank-1 diagonal values."""
    out = RationalFn.one(char)
    one = LaurentPoly.one(char)
    for k, ck in enumerate(c):
        d = h.datum.d(h.letters[k])
        for m in range(1, ck + 1):
            out = out * RationalFn(one, one - LaurentPoly.q_power(2 * d * m, char))
    return out


@lru_cache(maxsize=None)
def _suffix_support(h: ReducedWord) -> tuple[tuple[int, ...], ...]:
    betas = beta_sequence(h)
    rank = h.datum.rank
    out = [(0,) * rank]
    for b in reversed(betas):
        prev = out[-1]
        out.append(tuple(max(p, 1 if x else 0) for p, x in zip(prev, b)))
    return tuple(reversed(out))


def enumerate_c(weight: tuple[int, ...], h: ReducedWord) -> list[tuple[int, ...]]:
    """All exponent vectors of a given weight, in descending lexicographic order."""
    betas = beta_sequence(h)
    support = _suffix_support(h)
    nu = len(betas)
    out: list[tuple[int, ...]] = []

    def rec(k: int, remaining: tuple[int, ...], prefix: tuple[int, ...]):
        if k == nu:
            if not any(remaining):
                out.append(prefix)
            return
        if any(r and not s for r, s in zip(remaining, support[k])):
            return
        b = betas[k]
        m = min((r // x for r, x in zip(remaining, b) if x), default=0)
        for t in range(m, -1, -1):
            rec(k + 1, tuple(r - t * x for r, x in zip(remaining, b)),
                prefix + (t,))

    rec(0, tuple(weight), ())
    return out


@dataclass
class PBWElt:
    """Coordinates of an element relative to the monomial family of one word."""
    h: ReducedWord
    weight: tuple[int, ...]
    char: int
    coords: dict  # c -> RationalFn, no zero values

    def materialize(self) -> FreeElt:
        out = FreeElt.zero(self.h.datum, self.char)
        for c, a in self.coords.items():
            out = out + pbw_monomial(c, self.h, self.char).scale(a)
        return out

    def is_laurent(self) -> bool:
        return all(a.is_laurent for a in self.coords.values())

    def leading(self) -> tuple[int, ...]:
        return min(self.coords)

    def __str__(self):
        rows = [f"  {c}: {a}" for c, a in sorted(self.coords.items())]
        return "PBW coordinates (word %s):\n%s" % (
            ",".join(self.h.labels), "\n".join(rows) or "  0")


def pbw_expand(x: FreeElt, h: ReducedWord, verify: bool = False) -> PBWElt:
    """Coordinates of x in the orthogonal monomial family of h.

    Requires x homogeneous; coordinates are inner products against the
    monomials divided by the diagonal values.
    """
    from .freealg import FormSession, _clear_denominators

    if x.datum != h.datum:
        raise QfoldError("element and word over different data")
    mu = x.weight()
    cs = enumerate_c(mu, h)
    char = x.char
    if not x.terms:
        return PBWElt(h, mu, char, {})
    yraw, yscale = _clear_denominators(x.datum, char, plainify(x))
    session = FormSession(x.datum, char, yraw)
    from .freealg import _weight_scalar
    wscal = _weight_scalar(x.datum, char, mu)
    coords = {}
    for c in cs:
        num = RationalFn.zero(char)
        for w, cw in sorted(plainify(pbw_monomial(c, h, char)).items()):
            val = session.word_value(w)
            if val:
                num = num + cw * RationalFn(LaurentPoly(val, char))
        if num.is_zero():
            continue
        coord = num * yscale * wscal / diagonal_form_value(h, c, char)
        if not coord.is_zero():
            coords[c] = coord
    out = PBWElt(h, mu, char, coords)
    if verify:
        if not is_zero(out.materialize() - x):
            raise ExpansionError("expansion does not reconstruct the element")
    return out


def sigma_on_pbw(lifted: LiftedWord, p: PBWElt) -> PBWElt:
    """Automorphism action in coordinates: permute exponents within blocks."""
    if p.h != lifted.word:
        raise QfoldError("coordinates are not relative to the lifted word")
    pp = lifted.position_permutation()
    coords = {}
    for c, a in p.coords.items():
        cc = [0] * len(c)
        for j, v in enumerate(c):
            cc[pp[j]] = v
        coords[tuple(cc)] = a
    aut = lifted.folding.aut
    mu = tuple(p.weight[aut.perm.index(t)] for t in range(len(p.weight)))
    return PBWElt(p.h, mu, p.char, coords)


def block_constant_c(lifted: LiftedWord, ulc: tuple[int, ...]) -> tuple[int, ...]:
    """Exponent vector constant on each block, one block per quotient letter."""
    if len(ulc) != len(lifted.blocks):
        raise QfoldError("quotient exponent vector has wrong length")
    c = [0] * len(lifted.word)
    for k, blk in enumerate(lifted.blocks):
        for j in blk:
            c[j] = ulc[k]
    return tuple(c)
