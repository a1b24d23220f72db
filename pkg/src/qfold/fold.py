"""The mod-eps quotient: sigma-fixed elements, the orbit-sum ideal, and the
quotient algebra V with its orthogonal E-basis.

Elements of the quotient are held directly in E-coordinates: the projection
of a sigma-fixed element is computed in closed form from the contraction form
(the orbit-sum ideal is killed by the form over GF(eps), and the E-family is
orthogonal with nonzero diagonal), so no coset arithmetic is ever needed.
The homomorphism from the folded algebra substitutes each folded generator by
the product of its orbit and projects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cartan import FoldedDatum
from .canonical import CanonicalBasisSlice, SliceCache, canonical_slice, \
    sigma_stable_elements
from .errors import ProjectionError, QfoldError
from .freealg import (
    FreeElt, FormSession, _clear_denominators, _weight_scalar, bar_elt, gen,
    is_zero, multiply, plainify, reduce_elt, sigma_elt, word_elt,
)
from .qarith import LaurentPoly, RationalFn, reduce_mod
from .pbw import (
    apply_braid_word, block_constant_c, diagonal_form_value, enumerate_c,
    pbw_monomial,
)
from .weyl import LiftedWord, ReducedWord, lift_word


# ---------------------------------------------------------------------------
# weights

def is_sigma_stable_weight(folding: FoldedDatum, weight: tuple[int, ...]) -> bool:
    return all(len({weight[i] for i in orb}) == 1 for orb in folding.orbits)


def ul_weight_of(folding: FoldedDatum, weight: tuple[int, ...]) -> tuple[int, ...]:
    if not is_sigma_stable_weight(folding, weight):
        raise ProjectionError(f"weight {weight} is not stable under the automorphism")
    return tuple(weight[orb[0]] for orb in folding.orbits)


def weight_of_ul(folding: FoldedDatum, ul_weight: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * folding.source.rank
    for k, orb in enumerate(folding.orbits):
        for i in orb:
            out[i] = ul_weight[k]
    return tuple(out)


def sigma_stable_weights(folding: FoldedDatum, max_height: int
                         ) -> list[tuple[int, ...]]:
    """All automorphism-stable source weights of height <= max_height."""
    import itertools
    sizes = [len(orb) for orb in folding.orbits]
    out = []
    for gammas in itertools.product(range(max_height + 1),
                                    repeat=len(sizes)):
        h = sum(g * s for g, s in zip(gammas, sizes))
        if 0 < h <= max_height:
            out.append(weight_of_ul(folding, gammas))
    out.sort(key=lambda w: (sum(w), w))
    return out


# ---------------------------------------------------------------------------
# quotient elements

@dataclass
class VqElt:
    folding: FoldedDatum
    ulh: ReducedWord
    weight: tuple[int, ...]            # weight over the folded datum
    coords: dict = field(default_factory=dict)  # ulc -> RationalFn over GF(eps)

    @property
    def eps(self) -> int:
        return self.folding.aut.order

    def is_zero(self) -> bool:
        return not self.coords

    def key(self):
        """Hashable canonical form, for set comparisons."""
        return (self.weight,
                tuple(sorted((c, a) for c, a in self.coords.items())))

    def __eq__(self, other):
        if not isinstance(other, VqElt):
            return NotImplemented
        return (self.folding == other.folding and self.ulh == other.ulh
                and self.weight == other.weight and self.coords == other.coords)

    def __str__(self):
        if not self.coords:
            return "0"
        return " + ".join(f"({a})*E{list(c)}"
                          for c, a in sorted(self.coords.items()))

    __repr__ = __str__


def unit_vq(folding: FoldedDatum, ulh: ReducedWord, ulc: tuple[int, ...]) -> VqElt:
    from .weyl import beta_sequence
    betas = beta_sequence(ulh)
    wt = tuple(sum(c * b[t] for c, b in zip(ulc, betas))
               for t in range(folding.quotient.rank))
    eps = folding.aut.order
    return VqElt(folding, ulh, wt, {tuple(ulc): RationalFn.one(eps)})


def _lifted(folding: FoldedDatum, ulh: ReducedWord) -> LiftedWord:
    return lift_word(folding, ulh)


def _reduced_monomial(lifted: LiftedWord, c: tuple[int, ...], eps: int) -> FreeElt:
    return reduce_elt(pbw_monomial(c, lifted.word, 0), eps)


def pi_project(x: FreeElt, folding: FoldedDatum, ulh: ReducedWord,
               check_fixed: bool = True) -> VqElt:
    """Project a sigma-fixed element to E-coordinates over GF(eps).

    Coordinates are inner products against the block-constant monomials
    divided by their (nonzero) diagonal form values; orbit sums project to
    zero because the form kills them over GF(eps).
    """
    eps = folding.aut.order
    if eps not in (2, 3):
        raise ProjectionError("folding automorphism must have order 2 or 3")
    if x.char != eps:
        raise ProjectionError(f"element must live over GF({eps})")
    if x.datum != folding.source:
        raise ProjectionError("element is over the wrong datum")
    lifted = _lifted(folding, ulh)
    if not x.terms:
        return VqElt(folding, ulh, (0,) * folding.quotient.rank, {})
    mu = x.weight()
    ul_mu = ul_weight_of(folding, mu)  # raises when not stable
    if check_fixed:
        diff = sigma_elt(folding.aut, x) - x
        if not (diff.is_zero_literal() or is_zero(diff)):
            raise ProjectionError("element is not fixed by the automorphism")
    ulcs = enumerate_c(ul_mu, ulh)
    yraw, yscale = _clear_denominators(x.datum, eps, plainify(x))
    session = FormSession(x.datum, eps, yraw)
    wscal = _weight_scalar(x.datum, eps, mu)
    coords = {}
    for ulc in ulcs:
        c = block_constant_c(lifted, ulc)
        num = RationalFn.zero(eps)
        mono = _reduced_monomial(lifted, c, eps)
        for w, cw in sorted(plainify(mono).items()):
            val = session.word_value(w)
            if val:
                num = num + cw * RationalFn(LaurentPoly(val, eps))
        if num.is_zero():
            continue
        diag = diagonal_form_value(lifted.word, c, eps)
        if diag.is_zero():
            raise ProjectionError("diagonal form value vanished mod eps")
        coords[ulc] = num * yscale * wscal / diag
    return VqElt(folding, ulh, ul_mu, coords)


def substitute(ulx: FreeElt, folding: FoldedDatum) -> FreeElt:
    """Replace each folded generator power by the product over its orbit."""
    if ulx.datum != folding.quotient:
        raise QfoldError("element is not over the folded datum")
    out = FreeElt.zero(folding.source, ulx.char)
    for w, coeff in ulx.terms.items():
        term = FreeElt.scalar(folding.source, coeff, ulx.char)
        for eta, a in w:
            for i in folding.orbits[eta]:
                term = multiply(term, gen(folding.source, i, a, ulx.char))
        out = out + term
    return out


def phi_apply(ulx: FreeElt, folding: FoldedDatum, ulh: ReducedWord) -> VqElt:
    """The algebra map: folded generators to orbit products, then project."""
    eps = folding.aut.order
    if ulx.char == 0:
        ulx = reduce_elt(ulx, eps)
    return pi_project(substitute(ulx, folding), folding, ulh, check_fixed=False)


def orbit_sum(x: FreeElt, folding: FoldedDatum) -> FreeElt:
    out = x
    y = x
    for _ in range(folding.aut.order - 1):
        y = sigma_elt(folding.aut, y)
        out = out + y
    return out


def vq_mul(u: VqElt, v: VqElt) -> VqElt:
    """Multiply via block-constant representatives (well defined mod the ideal)."""
    folding, ulh = u.folding, u.ulh
    eps = u.eps
    lifted = _lifted(folding, ulh)
    rep = FreeElt.zero(folding.source, eps)
    for uc, a in u.coords.items():
        rep = rep + _reduced_monomial(lifted, block_constant_c(lifted, uc), eps).scale(a)
    rep_v = FreeElt.zero(folding.source, eps)
    for vc, b in v.coords.items():
        rep_v = rep_v + _reduced_monomial(lifted, block_constant_c(lifted, vc), eps).scale(b)
    return pi_project(multiply(rep, rep_v), folding, ulh, check_fixed=False)


def vq_bar(u: VqElt) -> VqElt:
    """Bar involution transported through representatives."""
    folding, ulh = u.folding, u.ulh
    lifted = _lifted(folding, ulh)
    rep = FreeElt.zero(folding.source, u.eps)
    for uc, a in u.coords.items():
        rep = rep + _reduced_monomial(lifted, block_constant_c(lifted, uc), u.eps).scale(a)
    return pi_project(bar_elt(rep), folding, ulh, check_fixed=False)


# ---------------------------------------------------------------------------
# theorem-level checks

def braid_block_chain(lifted: LiftedWord, k: int, eps: int) -> FreeElt:
    """R_{eta_1} ... R_{eta_{k-1}} applied to the orbit product of eta_k."""
    folding = lifted.folding
    eta_k = lifted.ul_word.letters[k - 1]
    x = word_elt(folding.source,
                 [folding.source.labels[i] for i in folding.orbits[eta_k]],
                 char=eps)
    prefix: list[int] = []
    for t in range(k - 1):
        for j in lifted.blocks[t]:
            prefix.append(lifted.word.letters[j])
    return apply_braid_word(prefix, x)


def lemma113_check(folding: FoldedDatum, ulh: ReducedWord) -> list[dict]:
    """Compare the folded braid chains with the projected block chains.

    Left side: braid chains computed inside the folded algebra, then mapped
    through the generator substitution and projected.  Right side: block
    operator chains upstairs, projected.  Rank-2 folded datum required.
    """
    if folding.quotient.rank != 2:
        raise QfoldError("the block-chain comparison needs a rank-2 folded datum")
    eps = folding.aut.order
    lifted = _lifted(folding, ulh)
    out = []
    for k in range(1, len(ulh) + 1):
        ul_chain = apply_braid_word(
            ulh.letters[: k - 1], gen(folding.quotient, ulh.letters[k - 1], 1, 0))
        lhs = phi_apply(ul_chain, folding, ulh)
        rhs = pi_project(braid_block_chain(lifted, k, eps), folding, ulh,
                         check_fixed=False)
        if lhs != rhs:
            raise ProjectionError(
                f"block-chain comparison failed at position {k}: {lhs} vs {rhs}")
        out.append({"k": k, "value": lhs})
    return out


def thm114_check(ulc: tuple[int, ...], ulh: ReducedWord,
                 folding: FoldedDatum) -> bool:
    """Does the folded monomial map to the matching E-basis vector?"""
    ul_l = pbw_monomial(tuple(ulc), ulh, 0)
    got = phi_apply(ul_l, folding, ulh)
    return got == unit_vq(folding, ulh, tuple(ulc))


def phi_spans_weight(folding: FoldedDatum, ulh: ReducedWord,
                     ul_weight: tuple[int, ...]) -> bool:
    """Rank check: images of the folded monomials span the weight space."""
    ulcs = enumerate_c(ul_weight, ulh)
    rows = []
    for ulc in ulcs:
        v = phi_apply(pbw_monomial(ulc, ulh, 0), folding, ulh)
        rows.append([v.coords.get(c2, RationalFn.zero(v.eps)) for c2 in ulcs])
    # Gaussian elimination over the rational-function field
    n = len(rows)
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, n) if not rows[r][col].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inv()
        rows[rank] = [a * inv for a in rows[rank]]
        for r in range(n):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank == n


@dataclass
class CongruenceRow:
    ulc: tuple[int, ...]
    uld: tuple[int, ...]
    a_folded: LaurentPoly     # folded-side coefficient mod eps
    a_stable: LaurentPoly     # sigma-stable-side coefficient mod eps
    congruent: bool


@dataclass
class CongruenceReport:
    weight: tuple[int, ...]
    ul_weight: tuple[int, ...]
    rows: list

    @property
    def all_congruent(self) -> bool:
        return all(r.congruent for r in self.rows)


def congruence_report(weight: tuple[int, ...], folding: FoldedDatum,
                      ulh: ReducedWord,
                      cache: SliceCache | None = None) -> CongruenceReport:
    """Coefficientwise mod-eps comparison of the two canonical expansions.

    The sigma-stable entries upstairs are aligned with the folded entries via
    the block-constant parametrization; for each aligned pair, every folded
    coefficient must agree mod eps with the stable coefficient at the
    corresponding block-constant index (zero when the index is absent).
    """
    eps = folding.aut.order
    lifted = _lifted(folding, ulh)
    ul_mu = ul_weight_of(folding, weight)
    up = canonical_slice(weight, lifted.word, 0, cache)
    stable = sigma_stable_elements(up, lifted)
    down = canonical_slice(ul_mu, ulh, 0, cache)
    by_ulc = {}
    for c in stable:
        ulc = tuple(c[blk[0]] for blk in lifted.blocks)
        by_ulc[ulc] = up.entries[c]
    if set(by_ulc) != set(down.entries):
        raise ProjectionError(
            f"stable entries {sorted(by_ulc)} and folded entries "
            f"{sorted(down.entries)} are not aligned at weight {weight}")
    rows = []
    for ulc in sorted(by_ulc):
        up_entry = by_ulc[ulc]
        down_entry = down.entries[ulc]
        up_stable = {}
        for d, a in up_entry.items():
            if all(len({d[j] for j in blk}) == 1 for blk in lifted.blocks):
                up_stable[tuple(d[blk[0]] for blk in lifted.blocks)] = a
        for uld in sorted(set(down_entry) | set(up_stable)):
            a_f = reduce_mod(down_entry.get(uld, LaurentPoly.zero()), eps)
            a_s = reduce_mod(up_stable.get(uld, LaurentPoly.zero()), eps)
            rows.append(CongruenceRow(ulc, uld, a_f, a_s, a_f == a_s))
    return CongruenceReport(weight, ul_mu, rows)


def bijection_check(weight: tuple[int, ...], folding: FoldedDatum,
                    ulh: ReducedWord,
                    cache: SliceCache | None = None) -> bool:
    """Projected stable elements and images of folded elements agree setwise,
    and every projection has the unitriangular q-shape in E-coordinates."""
    eps = folding.aut.order
    lifted = _lifted(folding, ulh)
    ul_mu = ul_weight_of(folding, weight)
    if sum(weight) == 0:
        return True
    up = canonical_slice(weight, lifted.word, 0, cache)
    stable = sigma_stable_elements(up, lifted)
    projected = {}
    for c, elt in stable.items():
        rep = FreeElt.zero(folding.source, eps)
        for d, a in elt.coords.items():
            rep = rep + _reduced_monomial(lifted, d, eps).scale(a.reduce_mod(eps))
        v = pi_project(rep, folding, ulh, check_fixed=False)
        ulc = tuple(c[blk[0]] for blk in lifted.blocks)
        projected[ulc] = v
        # expected shape: unit leading coordinate, corrections in q GF(eps)[q]
        if not v.coords or min(v.coords) != ulc:
            return False
        if not v.coords[ulc].is_one():
            return False
        for d, a in v.coords.items():
            if d == ulc:
                continue
            if not (d > ulc and a.is_laurent and a.laurent().in_q_only()):
                return False
    down = canonical_slice(ul_mu, ulh, 0, cache)
    images = set()
    for ulc in down.entries:
        rep = FreeElt.zero(folding.quotient, eps)
        for uld, a in down.entries[ulc].items():
            rep = rep + reduce_elt(pbw_monomial(uld, ulh, 0), eps).scale(
                RationalFn(reduce_mod(a, eps)))
        images.add(phi_apply(rep, folding, ulh).key())
    return images == {v.key() for v in projected.values()}
