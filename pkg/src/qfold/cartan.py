"""Cartan data, admissible diagram automorphisms, and folding.

A Cartan datum is a vertex list together with a symmetric integer matrix
``form`` whose diagonal entries are positive even and whose off-diagonal
entries produce nonpositive integers 2*form[i][j]/form[i][i].  An admissible
automorphism is a form-preserving permutation whose orbits consist of
pairwise-orthogonal vertices; folding such a pair produces a new datum on the
orbit set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import AutomorphismError, DatumError, QfoldError


@dataclass(frozen=True)
class CartanDatum:
    labels: tuple[str, ...]
    form: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise QfoldError(f"unknown vertex label {label!r}") from None

    def pairing(self, i: int, j: int) -> int:
        return self.form[i][j]

    def d(self, i: int) -> int:
        """Half the squared length of the i-th simple root; q_i = q^{d(i)}."""
        return self.form[i][i] // 2

    def a(self, i: int, j: int) -> int:
        """Cartan matrix entry 2(alpha_i, alpha_j)/(alpha_i, alpha_i)."""
        return 2 * self.form[i][j] // self.form[i][i]

    @property
    def simply_laced(self) -> bool:
        n = self.rank
        for i in range(n):
            if self.form[i][i] != 2:
                return False
            for j in range(n):
                if i != j and self.form[i][j] not in (0, -1):
                    return False
        return True

    def root_name(self, coords: tuple[int, ...]) -> str:
        """Additive name of a root: label repeated by multiplicity, e.g. 122'."""
        return "".join(lab * m for lab, m in zip(self.labels, coords))

    def to_json(self) -> dict:
        return {"labels": list(self.labels),
                "form": [list(row) for row in self.form]}


def make_datum(labels, form_matrix) -> CartanDatum:
    labels = tuple(str(x) for x in labels)
    n = len(labels)
    if len(set(labels)) != n:
        raise DatumError("duplicate vertex labels")
    form = tuple(tuple(int(x) for x in row) for row in form_matrix)
    problems = []
    if len(form) != n or any(len(row) != n for row in form):
        raise DatumError(f"form matrix must be {n}x{n}")
    for i in range(n):
        for j in range(n):
            if form[i][j] != form[j][i]:
                problems.append(f"form[{labels[i]}][{labels[j]}] not symmetric")
    for i in range(n):
        di = form[i][i]
        if di <= 0 or di % 2:
            problems.append(
                f"(a_{labels[i]}, a_{labels[i]}) = {di} is not a positive even integer")
    for i in range(n):
        for j in range(n):
            if i == j or form[i][i] <= 0:
                continue
            two_ij = 2 * form[i][j]
            if two_ij > 0:
                problems.append(
                    f"(a_{labels[i]}, a_{labels[j]}) = {form[i][j]} is positive")
            elif two_ij % form[i][i]:
                problems.append(
                    f"2(a_{labels[i]}, a_{labels[j]})/(a_{labels[i]}, a_{labels[i]})"
                    " is not an integer")
    if problems:
        raise DatumError("; ".join(sorted(set(problems))))
    return CartanDatum(labels, form)


@dataclass(frozen=True)
class DiagramAut:
    datum: CartanDatum
    perm: tuple[int, ...]                 # vertex index -> vertex index
    order: int
    orbits: tuple[tuple[int, ...], ...]   # sorted by smallest member

    def apply(self, i: int) -> int:
        return self.perm[i]

    def orbit_of(self, i: int) -> int:
        for k, orb in enumerate(self.orbits):
            if i in orb:
                return k
        raise QfoldError(f"vertex index {i} out of range")

    def is_identity(self) -> bool:
        return all(self.perm[i] == i for i in range(len(self.perm)))

    def to_json(self) -> dict:
        labs = self.datum.labels
        return {"perm": {labs[i]: labs[self.perm[i]] for i in range(len(labs))},
                "order": self.order,
                "orbits": [[labs[i] for i in orb] for orb in self.orbits]}


def make_automorphism(datum: CartanDatum, perm) -> DiagramAut:
    """Validate a permutation of the vertex labels as an admissible automorphism."""
    n = datum.rank
    if isinstance(perm, dict):
        idx = tuple(datum.index(perm[lab]) for lab in datum.labels)
    else:
        idx = tuple(datum.index(str(x)) for x in perm)
    if sorted(idx) != list(range(n)):
        raise AutomorphismError("not a permutation of the vertex set")
    for i in range(n):
        for j in range(n):
            if datum.form[idx[i]][idx[j]] != datum.form[i][j]:
                raise AutomorphismError(
                    f"form not preserved at ({datum.labels[i]}, {datum.labels[j]})")
    # orbit partition
    seen = [False] * n
    orbits = []
    for i in range(n):
        if seen[i]:
            continue
        orb = [i]
        seen[i] = True
        j = idx[i]
        while j != i:
            orb.append(j)
            seen[j] = True
            j = idx[j]
        orbits.append(tuple(sorted(orb)))
    orbits.sort(key=lambda o: o[0])
    for orb in orbits:
        for i in orb:
            for j in orb:
                if i != j and datum.form[i][j] != 0:
                    raise AutomorphismError(
                        f"not admissible: ({datum.labels[i]}, {datum.labels[j]}) = "
                        f"{datum.form[i][j]} inside one orbit")
    order = 1
    cur = idx
    ident = tuple(range(n))
    while cur != ident:
        cur = tuple(idx[c] for c in cur)
        order += 1
        if order > n + 1:
            raise AutomorphismError("permutation order overflow")
    if order not in (1, 2, 3):
        raise AutomorphismError(f"automorphism order {order} not in {{2, 3}}")
    return DiagramAut(datum, idx, order, tuple(orbits))


@dataclass(frozen=True)
class FoldedDatum:
    source: CartanDatum
    aut: DiagramAut
    quotient: CartanDatum
    # orbit index (= quotient vertex index) for each source vertex
    orbit_index: tuple[int, ...]

    @property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        return self.aut.orbits

    def orbit_size(self, k: int) -> int:
        return len(self.aut.orbits[k])


def fold(datum: CartanDatum, aut: DiagramAut) -> FoldedDatum:
    """Produce the Cartan datum on the orbit set of an admissible automorphism.

    Diagonal entries are 2|orbit|; the entry for two distinct orbits counts,
    with a minus sign, the joined pairs between them.
    """
    if aut.datum != datum:
        raise QfoldError("automorphism belongs to a different datum")
    orbits = aut.orbits
    m = len(orbits)
    qform = [[0] * m for _ in range(m)]
    for a_ in range(m):
        for b in range(m):
            if a_ == b:
                qform[a_][b] = 2 * len(orbits[a_])
            else:
                qform[a_][b] = -sum(
                    1 for i in orbits[a_] for j in orbits[b]
                    if datum.form[i][j] != 0)
    labels = tuple("u" + datum.labels[orb[0]] for orb in orbits)
    quotient = make_datum(labels, qform)
    orbit_index = tuple(aut.orbit_of(i) for i in range(datum.rank))
    return FoldedDatum(datum, aut, quotient, orbit_index)


# ---------------------------------------------------------------------------
# builtin data with the labeling conventions used throughout the test corpus

_PRIME = "′"        # '
_DPRIME = "″"       # ''


def _chain(labels: tuple[str, ...], edges: set[tuple[str, str]]) -> CartanDatum:
    n = len(labels)
    form = [[0] * n for _ in range(n)]
    for i in range(n):
        form[i][i] = 2
    for a, b in edges:
        i, j = labels.index(a), labels.index(b)
        form[i][j] = form[j][i] = -1
    return make_datum(labels, form)


@lru_cache(maxsize=None)
def builtin(name: str) -> tuple[CartanDatum, DiagramAut | None]:
    """Named data: A2, A2xA2, A3, D4 (with their automorphisms), B2, G2."""
    p, pp = _PRIME, _DPRIME
    if name == "A2":
        return _chain(("1", "2"), {("1", "2")}), None
    if name == "A2xA2":
        d = _chain(("1", "2", "1" + p, "2" + p),
                   {("1", "2"), ("1" + p, "2" + p)})
        aut = make_automorphism(
            d, ["1" + p, "2" + p, "1", "2"])
        return d, aut
    if name == "A3":
        d = _chain(("1", "2", "2" + p), {("1", "2"), ("1", "2" + p)})
        aut = make_automorphism(d, ["1", "2" + p, "2"])
        return d, aut
    if name == "D4":
        d = _chain(("1", "2", "2" + p, "2" + pp),
                   {("1", "2"), ("1", "2" + p), ("1", "2" + pp)})
        aut = make_automorphism(d, ["1", "2" + p, "2" + pp, "2"])
        return d, aut
    if name == "B2":
        return builtin_folding("A3").quotient, None
    if name == "G2":
        return builtin_folding("D4").quotient, None
    raise QfoldError(f"unknown builtin datum {name!r}")


@lru_cache(maxsize=None)
def builtin_folding(name: str) -> FoldedDatum:
    """Folded datum for a builtin source with its automorphism."""
    datum, aut = builtin(name)
    if aut is None:
        raise QfoldError(f"builtin {name!r} carries no automorphism")
    return fold(datum, aut)


_PAIRS = {"A2xA2:A2": "A2xA2", "A3:B2": "A3", "D4:G2": "D4"}


@lru_cache(maxsize=None)
def builtin_pair(pair: str) -> FoldedDatum:
    """Folding named source:target, one of A2xA2:A2, A3:B2, D4:G2."""
    if pair not in _PAIRS:
        raise QfoldError(f"unknown folding pair {pair!r}; try one of {sorted(_PAIRS)}")
    return builtin_folding(_PAIRS[pair])
