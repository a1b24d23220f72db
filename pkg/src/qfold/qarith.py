"""Exact arithmetic in the variable q.

Two scalar types are provided:

* :class:`LaurentPoly` -- Laurent polynomials in q with coefficients in Z
  (``char == 0``) or in GF(2)/GF(3) (``char == 2 | 3``), stored as a sparse
  exponent -> coefficient map with no zero entries.
* :class:`RationalFn` -- fractions of Laurent polynomials in canonical form,
  giving the fields Q(q) and GF(eps)(q).

Everything is immutable after construction; no floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import QfoldError, RingMismatchError

CHARS = (0, 2, 3)


# ---------------------------------------------------------------------------
# raw sparse-dict kernels (exponent -> int coefficient), shared by both types
# and by the hot loops elsewhere in the package

def lnorm(d: dict, char: int) -> dict:
    if char:
        return {e: c % char for e, c in d.items() if c % char}
    return {e: c for e, c in d.items() if c}


def ladd(a: dict, b: dict, char: int) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if char:
            s %= char
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def lmul(a: dict, b: dict, char: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return lnorm(out, char) if char else out


def lmono(a: dict, exp: int, coeff: int, char: int) -> dict:
    if not coeff:
        return {}
    if char:
        return lnorm({e + exp: c * coeff for e, c in a.items()}, char)
    return {e + exp: c * coeff for e, c in a.items()}


def lneg(a: dict, char: int) -> dict:
    if char:
        return {e: (-c) % char for e, c in a.items()}
    return {e: -c for e, c in a.items()}


def lbar(a: dict) -> dict:
    return {-e: c for e, c in a.items()}


class LaurentPoly:
    """Sparse Laurent polynomial over Z or GF(char)."""

    __slots__ = ("terms", "char", "_hash")

    def __init__(self, terms: dict | None = None, char: int = 0):
        if char not in CHARS:
            raise QfoldError(f"unsupported coefficient ring characteristic {char}")
        self.terms = lnorm(terms or {}, char) if terms else {}
        self.char = char
        self._hash = None

    # -- constructors -------------------------------------------------------
    @staticmethod
    def const(n: int, char: int = 0) -> "LaurentPoly":
        return LaurentPoly({0: n}, char)

    @staticmethod
    def q_power(n: int, char: int = 0) -> "LaurentPoly":
        return LaurentPoly({n: 1}, char)

    @staticmethod
    def zero(char: int = 0) -> "LaurentPoly":
        return LaurentPoly({}, char)

    @staticmethod
    def one(char: int = 0) -> "LaurentPoly":
        return LaurentPoly({0: 1}, char)

    # -- ring structure ------------------------------------------------------
    def _check(self, other: "LaurentPoly") -> None:
        if self.char != other.char:
            raise RingMismatchError(
                f"mixed characteristics {self.char} and {other.char}")

    def __add__(self, other):
        other = _coerce(other, self.char)
        self._check(other)
        return LaurentPoly(ladd(self.terms, other.terms, self.char), self.char)

    def __sub__(self, other):
        other = _coerce(other, self.char)
        return self + (-other)

    def __neg__(self):
        return LaurentPoly(lneg(self.terms, self.char), self.char)

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            return NotImplemented
        other = _coerce(other, self.char)
        self._check(other)
        return LaurentPoly(lmul(self.terms, other.terms, self.char), self.char)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return _coerce(other, self.char) - self

    def __pow__(self, n: int):
        if n < 0:
            raise QfoldError("negative powers live in RationalFn")
        out = LaurentPoly.one(self.char)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def bar(self) -> "LaurentPoly":
        """The involution q -> q^{-1}."""
        return LaurentPoly(lbar(self.terms), self.char)

    # -- queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {0: 1}

    def min_exp(self) -> int:
        if not self.terms:
            raise QfoldError("zero polynomial has no exponents")
        return min(self.terms)

    def max_exp(self) -> int:
        if not self.terms:
            raise QfoldError("zero polynomial has no exponents")
        return max(self.terms)

    def coeff(self, e: int) -> int:
        return self.terms.get(e, 0)

    def in_q_only(self) -> bool:
        """True when the value lies in q*Z[q] (positive exponents only)."""
        return all(e > 0 for e in self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other, self.char)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.char == other.char and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.char, tuple(sorted(self.terms.items()))))
        return self._hash

    # -- serialization --------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            sign = "-" if c < 0 else "+"
            c = abs(c)
            if e == 0:
                body = str(c)
            else:
                qpart = "q" if e == 1 else f"q^{e}"
                body = qpart if c == 1 else f"{c}*{qpart}"
            if not parts:
                parts.append(body if sign == "+" else "-" + body)
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    __repr__ = __str__

    @staticmethod
    def from_string(s: str, char: int = 0) -> "LaurentPoly":
        return _parse_laurent(s, char)

    def to_json(self) -> dict:
        return {"terms": [[e, self.terms[e]] for e in sorted(self.terms)]}

    @staticmethod
    def from_json(obj: dict, char: int = 0) -> "LaurentPoly":
        return LaurentPoly({int(e): int(c) for e, c in obj["terms"]}, char)


def _coerce(x, char: int) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.const(x, char)
    raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")


def _parse_laurent(s: str, char: int) -> LaurentPoly:
    s = s.replace("−", "-").replace(" ", "")
    if not s or s == "0":
        return LaurentPoly.zero(char)
    terms: dict = {}
    # split into signed monomials
    chunks: list[str] = []
    cur = ""
    for k, ch in enumerate(s):
        if ch in "+-" and k > 0 and s[k - 1] not in "^+-*":
            chunks.append(cur)
            cur = ch
        else:
            cur += ch
    chunks.append(cur)
    for chunk in chunks:
        sign = 1
        while chunk and chunk[0] in "+-":
            if chunk[0] == "-":
                sign = -sign
            chunk = chunk[1:]
        if not chunk:
            raise QfoldError("malformed polynomial string")
        if "q" in chunk:
            head, _, tail = chunk.partition("q")
            head = head.rstrip("*")
            coeff = int(head) if head else 1
            if tail.startswith("^"):
                exp = int(tail[1:])
            elif tail:
                raise QfoldError(f"malformed monomial {chunk!r}")
            else:
                exp = 1
        else:
            coeff = int(chunk)
            exp = 0
        terms[exp] = terms.get(exp, 0) + sign * coeff
    return LaurentPoly(terms, char)


# ---------------------------------------------------------------------------
# q-combinatorics

def bar_scalar(a: LaurentPoly) -> LaurentPoly:
    return a.bar()


@lru_cache(maxsize=None)
def q_integer(n: int, d: int = 1) -> LaurentPoly:
    """The balanced q-integer of n in the variable q^d, over Z.

    Defined by (q^{dn} - q^{-dn})/(q^d - q^{-d}); odd in n.
    """
    if d < 1:
        raise QfoldError("q_integer needs d >= 1")
    if n == 0:
        return LaurentPoly.zero()
    if n < 0:
        return -q_integer(-n, d)
    return LaurentPoly({d * (n - 1 - 2 * k): 1 for k in range(n)})


@lru_cache(maxsize=None)
def q_factorial(n: int, d: int = 1) -> LaurentPoly:
    if n < 0:
        raise QfoldError("q_factorial needs n >= 0")
    out = LaurentPoly.one()
    for i in range(1, n + 1):
        out = out * q_integer(i, d)
    return out


@lru_cache(maxsize=None)
def q_binomial(n: int, k: int, d: int = 1) -> LaurentPoly:
    """Gaussian binomial coefficient in q^d; always a Laurent polynomial."""
    if k < 0 or k > n:
        raise QfoldError(f"q_binomial needs 0 <= k <= n, got ({n}, {k})")
    if k == 0 or k == n:
        return LaurentPoly.one()
    # Pascal recursion in the balanced normalization.
    a = q_binomial(n - 1, k, d) * LaurentPoly.q_power(d * k)
    b = q_binomial(n - 1, k - 1, d) * LaurentPoly.q_power(d * (k - n))
    return a + b


def reduce_mod(a: LaurentPoly, eps: int) -> LaurentPoly:
    """Coefficientwise reduction Z[q,q^-1] -> GF(eps)[q,q^-1]."""
    if eps not in (2, 3):
        raise QfoldError(f"modulus must be 2 or 3, got {eps}")
    if a.char not in (0, eps):
        raise RingMismatchError(f"cannot reduce characteristic {a.char} mod {eps}")
    return LaurentPoly(dict(a.terms), eps)


# ---------------------------------------------------------------------------
# ordinary-polynomial utilities for fraction canonicalization; a polynomial is
# a coefficient list indexed by degree (constant term first)

def _lp_to_list(d: dict) -> list[int]:
    deg = max(d)
    out = [0] * (deg + 1)
    for e, c in d.items():
        out[e] = c
    return out


def _list_trim(v: list) -> list:
    while v and not v[-1]:
        v.pop()
    return v


def _gcd_charp(a: list[int], b: list[int], p: int) -> list[int]:
    a = _list_trim([c % p for c in a])
    b = _list_trim([c % p for c in b])
    while b:
        inv = pow(b[-1], -1, p)
        b = [c * inv % p for c in b]
        # a mod b
        a = a[:]
        while len(a) >= len(b) and a:
            f = a[-1]
            if f:
                off = len(a) - len(b)
                for i, c in enumerate(b):
                    a[off + i] = (a[off + i] - f * c) % p
            _list_trim(a)
            if len(a) < len(b):
                break
        a, b = b, a
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _gcd_char0(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd in Z[x] with positive leading coefficient."""
    fa = _list_trim([Fraction(c) for c in a])
    fb = _list_trim([Fraction(c) for c in b])
    while fb:
        lead = fb[-1]
        fb = [c / lead for c in fb]
        while len(fa) >= len(fb) and fa:
            f = fa[-1]
            if f:
                off = len(fa) - len(fb)
                for i, c in enumerate(fb):
                    fa[off + i] -= f * c
            _list_trim(fa)
            if len(fa) < len(fb):
                break
        fa, fb = fb, fa
    if not fa:
        return []
    from math import gcd, lcm
    den = lcm(*[c.denominator for c in fa]) if len(fa) > 1 else fa[0].denominator
    ints = [int(c * den) for c in fa]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _divexact(a: list[int], b: list[int], p: int) -> list[int]:
    """Exact division of polynomials; quotient has rational-free coefficients."""
    if p:
        a = [c % p for c in a]
        q = [0] * (len(a) - len(b) + 1)
        inv = pow(b[-1], -1, p)
        a = a[:]
        while _list_trim(a) and len(a) >= len(b):
            f = a[-1] * inv % p
            off = len(a) - len(b)
            q[off] = f
            for i, c in enumerate(b):
                a[off + i] = (a[off + i] - f * c) % p
        if _list_trim(a):
            raise QfoldError("inexact polynomial division")
        return q
    fa = [Fraction(c) for c in a]
    q = [Fraction(0)] * (len(fa) - len(b) + 1)
    while _list_trim(fa) and len(fa) >= len(b):
        f = fa[-1] / b[-1]
        off = len(fa) - len(b)
        q[off] = f
        for i, c in enumerate(b):
            fa[off + i] -= f * c
    if _list_trim(fa):
        raise QfoldError("inexact polynomial division")
    if any(c.denominator != 1 for c in q):
        raise QfoldError("inexact polynomial division")
    return [int(c) for c in q]


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Gcd of two ordinary polynomials (normalized as in RationalFn dens)."""
    if a.char != b.char:
        raise RingMismatchError("gcd over mixed characteristics")
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    la, lb = _lp_to_list(a.terms), _lp_to_list(b.terms)
    g = _gcd_charp(la, lb, a.char) if a.char else _gcd_char0(la, lb)
    return LaurentPoly({e: c for e, c in enumerate(g) if c}, a.char)


def poly_lcm(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Lcm of two ordinary polynomials, up to the ring's unit normalization."""
    if a.is_one():
        return b
    if b.is_one():
        return a
    if a == b:
        return a
    g = poly_gcd(a, b)
    la = _lp_to_list((a * b).terms)
    q = _divexact(la, _lp_to_list(g.terms), a.char)
    return LaurentPoly({e: c for e, c in enumerate(q) if c}, a.char)


class RationalFn:
    """Fraction num/den of Laurent polynomials in canonical form.

    The denominator is an ordinary polynomial with nonzero constant term and
    gcd(num, den) = 1.  Over GF(p) the denominator is monic; over Z it is
    primitive with positive leading coefficient (the closest integral analogue
    of monic), so canonical forms are unique and equality is literal.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None,
                 _normalized: bool = False):
        if den is None:
            den = LaurentPoly.one(num.char)
        if num.char != den.char:
            raise RingMismatchError("numerator/denominator characteristic mismatch")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if _normalized or den.is_one():
            self.num, self.den = num, den
        else:
            self.num, self.den = _canonical(num, den)
        self._hash = None

    char = property(lambda self: self.num.char)

    # -- constructors --------------------------------------------------------
    @staticmethod
    def of(x, char: int = 0) -> "RationalFn":
        if isinstance(x, RationalFn):
            return x
        if isinstance(x, LaurentPoly):
            return RationalFn(x)
        if isinstance(x, int):
            return RationalFn(LaurentPoly.const(x, char))
        raise TypeError(f"cannot coerce {type(x).__name__} to RationalFn")

    @staticmethod
    def zero(char: int = 0) -> "RationalFn":
        return RationalFn(LaurentPoly.zero(char))

    @staticmethod
    def one(char: int = 0) -> "RationalFn":
        return RationalFn(LaurentPoly.one(char))

    @staticmethod
    def q_power(n: int, char: int = 0) -> "RationalFn":
        return RationalFn(LaurentPoly.q_power(n, char))

    # -- field operations ----------------------------------------------------
    def __add__(self, other):
        other = RationalFn.of(other, self.char)
        if self.den.is_one() and other.den.is_one():
            return RationalFn(self.num + other.num, None, _normalized=True)
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    def __sub__(self, other):
        return self + (-RationalFn.of(other, self.char))

    def __neg__(self):
        return RationalFn(-self.num, self.den, _normalized=True)

    def __mul__(self, other):
        other = RationalFn.of(other, self.char)
        if self.den.is_one() and other.den.is_one():
            return RationalFn(self.num * other.num, None, _normalized=True)
        return RationalFn(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = RationalFn.of(other, self.char)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return RationalFn.of(other, self.char) - self

    def __rtruediv__(self, other):
        return RationalFn.of(other, self.char) / self

    def inv(self) -> "RationalFn":
        return RationalFn.one(self.char) / self

    def bar(self) -> "RationalFn":
        return RationalFn(self.num.bar(), self.den.bar())

    def reduce_mod(self, eps: int) -> "RationalFn":
        den = reduce_mod(self.den, eps)
        if den.is_zero():
            raise QfoldError("denominator vanishes under reduction")
        return RationalFn(reduce_mod(self.num, eps), den)

    # -- queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    @property
    def is_laurent(self) -> bool:
        return self.den.is_one()

    def laurent(self) -> LaurentPoly:
        if not self.den.is_one():
            raise QfoldError(f"{self} is not a Laurent polynomial")
        return self.num

    def series(self, lo: int, hi: int) -> dict[int, Fraction]:
        """Exact power-series coefficients of the fraction for lo <= exp <= hi."""
        if self.num.is_zero():
            return {}
        c0 = Fraction(self.den.coeff(0))
        n_min = self.num.min_exp()
        order = hi - min(lo, n_min) + 1
        inv = [Fraction(0)] * order
        inv[0] = 1 / c0
        dterms = self.den.terms
        for k in range(1, order):
            s = Fraction(0)
            for e, c in dterms.items():
                if 0 < e <= k:
                    s += c * inv[k - e]
            inv[k] = -s / c0
        out: dict[int, Fraction] = {}
        for e, c in self.num.terms.items():
            for k, ic in enumerate(inv):
                t = e + k
                if t > hi:
                    break
                out[t] = out.get(t, Fraction(0)) + c * ic
        return {e: c for e, c in out.items() if lo <= e <= hi and c}

    def __eq__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RationalFn.of(other, self.char)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    __repr__ = __str__


def _canonical(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    char = num.char
    if num.is_zero():
        return LaurentPoly.zero(char), LaurentPoly.one(char)
    # shift all q-powers out of the denominator
    s = den.min_exp()
    den_d = {e - s: c for e, c in den.terms.items()}
    num_d = {e - s: c for e, c in num.terms.items()}
    t = min(num_d)
    num_ord = [0] * (max(num_d) - t + 1)
    for e, c in num_d.items():
        num_ord[e - t] = c
    den_ord = _lp_to_list(den_d)
    g = _gcd_charp(num_ord, den_ord, char) if char else _gcd_char0(num_ord, den_ord)
    if len(g) > 1:
        num_ord = _divexact(num_ord, g, char)
        den_ord = _divexact(den_ord, g, char)
    if char:
        inv = pow(den_ord[-1], -1, char)
        den_ord = [c * inv % char for c in den_ord]
        num_ord = [c * inv % char for c in num_ord]
    else:
        from math import gcd
        cn = 0
        for c in num_ord:
            cn = gcd(cn, c)
        cd = 0
        for c in den_ord:
            cd = gcd(cd, c)
        g2 = gcd(cn, cd)
        if g2 > 1:
            num_ord = [c // g2 for c in num_ord]
            den_ord = [c // g2 for c in den_ord]
        if den_ord[-1] < 0:
            num_ord = [-c for c in num_ord]
            den_ord = [-c for c in den_ord]
    new_num = LaurentPoly({e + t: c for e, c in enumerate(num_ord) if c}, char)
    new_den = LaurentPoly({e: c for e, c in enumerate(den_ord) if c}, char)
    return new_num, new_den
