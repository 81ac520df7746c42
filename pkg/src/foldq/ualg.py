"""The algebra U_q^- and a small triangular U_q layer for braid operators.

Elements of U_q^- are finite sums of divided-power words
``f_{i1}^{(n1)} ... f_{ik}^{(nk)}`` with coefficients in Z[q^+-1], F_p[q^+-1]
or their fraction fields.  Equality in U_q^- (that is, modulo the Serre
ideal) is decided through the quantum-shuffle embedding ``psi``: U_q^- maps
injectively into the free module on words, ``f_i`` going to the one-letter
word ``(i)`` and products going to q-twisted shuffles.

Twist conventions (used everywhere in the package):

* U_q^- (x) U_q^- has product (a(x)b)(c(x)d) = q^{-(|b|,|c|)} ac (x) bd;
* r(f_{w}) = sum over splittings of w into a left and right subword, weighted
  by q^{-sum (a_b, a_c)} over pairs with b in the right part, c in the left
  part and b before c;
* (f_i, f_j) = delta_ij / (1 - q_i^2) and (x, yz) = (r(x), y (x) z).

With these, ``psi(x)_w = (x, f_w) / prod_k (f_{w_k}, f_{w_k})``.
"""

from __future__ import annotations

import re
import threading
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .cartan import CartanDatum, DiagramAutomorphism
from .qcoeff import LaurentPoly, RatFn, as_coeff, qbinom, qfact

Key = tuple[tuple[int, int], ...]  # ((letter, exponent), ...) with runs merged
Word = tuple[int, ...]
Coeff = LaurentPoly | RatFn


class AlgebraError(ValueError):
    pass


class LeftUMinus(AlgebraError):
    """Raised when a U_q element is expected to lie in U_q^- but does not."""


class ParseError(AlgebraError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _is_zero(c) -> bool:
    return c == 0 if isinstance(c, int) else c.is_zero()


def _coerce(c, p: int) -> Coeff:
    if isinstance(c, int):
        return LaurentPoly.const(c, p)
    if c.p != p:
        if p and not c.p:
            return as_coeff(c.reduce(p))
        raise AlgebraError("ring mismatch: moduli differ")
    return as_coeff(c)


def _render_coeff(c: Coeff) -> str:
    """'' for 1, '-' for -1, otherwise a parseable factor followed by '*'."""
    if isinstance(c, LaurentPoly):
        if c == 1:
            return ""
        if c == -1:
            return "-"
        if c.is_monomial():
            (e, v), = c.items()
            sign = "-" if v < 0 else ""
            mag = abs(v)
            qpart = "q" if e == 1 else f"q^{e}" if e > 0 else f"q^({e})"
            if e == 0:
                return f"{sign}{mag}*"
            return f"{sign}{qpart}*" if mag == 1 else f"{sign}{mag}*{qpart}*"
    return f"({c})*"


def merge_key(parts: Iterable[tuple[int, int]], datum: CartanDatum, p: int = 0) -> tuple[Key, LaurentPoly]:
    """Merge adjacent equal letters: f_i^{(a)} f_i^{(b)} = [a+b choose a]_i f_i^{(a+b)}."""
    out: list[list[int]] = []
    coeff = LaurentPoly.const(1, p)
    for i, n in parts:
        if n == 0:
            continue
        if out and out[-1][0] == i:
            a = out[-1][1]
            coeff = coeff * qbinom(a + n, n, datum.d(i), p)
            out[-1][1] = a + n
        else:
            out.append([i, n])
    return tuple((i, n) for i, n in out), coeff


def key_weight(key: Key, rank: int) -> tuple[int, ...]:
    w = [0] * rank
    for i, n in key:
        w[i] += n
    return tuple(w)


def key_word(key: Key) -> Word:
    return tuple(i for i, n in key for _ in range(n))


class UMinusElt:
    """Immutable element of U_q^- given by a divided-power word expansion.

    ``terms`` maps merged divided-power keys to nonzero coefficients.
    Equality via ``==`` is equality of expressions; use :meth:`equals` for
    equality in U_q^-.
    """

    __slots__ = ("datum", "p", "terms", "_hash")

    def __init__(self, datum: CartanDatum, terms: Mapping[Key, Coeff] | None = None, p: int = 0):
        self.datum = datum
        self.p = p
        clean: dict[Key, Coeff] = {}
        if terms:
            for k, c in terms.items():
                c = _coerce(c, p)
                if not _is_zero(c):
                    clean[k] = c
        self.terms = clean
        self._hash = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def one(cls, datum: CartanDatum, p: int = 0) -> "UMinusElt":
        return cls(datum, {(): 1}, p)

    @classmethod
    def zero(cls, datum: CartanDatum, p: int = 0) -> "UMinusElt":
        return cls(datum, {}, p)

    @classmethod
    def gen(cls, datum: CartanDatum, i: int, n: int = 1, p: int = 0) -> "UMinusElt":
        """The divided power f_i^{(n)}."""
        if n < 0:
            raise AlgebraError("divided power exponent must be non-negative")
        return cls(datum, {((i, n),) if n else (): 1}, p)

    @classmethod
    def word(cls, datum: CartanDatum, parts: Sequence[tuple[int, int]] | Sequence[int], coeff=1, p: int = 0) -> "UMinusElt":
        """Product of divided powers; ``parts`` is a list of (letter, n) or plain letters."""
        norm = [(x, 1) if isinstance(x, int) else (int(x[0]), int(x[1])) for x in parts]
        key, c = merge_key(norm, datum, p)
        return cls(datum, {key: c * _coerce(coeff, p)}, p)

    # -- inspection -----------------------------------------------------
    def is_zero_expression(self) -> bool:
        return not self.terms

    def weights(self) -> set[tuple[int, ...]]:
        return {key_weight(k, self.datum.rank) for k in self.terms}

    def weight(self) -> tuple[int, ...]:
        ws = self.weights()
        if len(ws) != 1:
            raise AlgebraError("element is not weight-homogeneous")
        return next(iter(ws))

    def homogeneous_components(self) -> dict[tuple[int, ...], "UMinusElt"]:
        out: dict[tuple[int, ...], dict] = {}
        for k, c in self.terms.items():
            out.setdefault(key_weight(k, self.datum.rank), {})[k] = c
        return {w: UMinusElt(self.datum, t, self.p) for w, t in out.items()}

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "UMinusElt") -> None:
        if other.datum != self.datum:
            raise AlgebraError("elements belong to different algebras")
        if other.p != self.p:
            raise AlgebraError("ring mismatch: moduli differ")

    def __add__(self, other):
        if isinstance(other, (int, LaurentPoly, RatFn)):
            other = UMinusElt(self.datum, {(): other}, self.p)
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t[k] + c if k in t else c
        return UMinusElt(self.datum, t, self.p)

    __radd__ = __add__

    def __neg__(self):
        return UMinusElt(self.datum, {k: -c for k, c in self.terms.items()}, self.p)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "UMinusElt":
        c = _coerce(c, self.p)
        return UMinusElt(self.datum, {k: v * c for k, v in self.terms.items()}, self.p)

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly, RatFn)):
            return self.scale(other)
        self._check(other)
        t: dict[Key, Coeff] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k, m = merge_key(k1 + k2, self.datum, self.p)
                c = c1 * c2 * m
                t[k] = t[k] + c if k in t else c
        return UMinusElt(self.datum, t, self.p)

    def __rmul__(self, other):
        if isinstance(other, (int, LaurentPoly, RatFn)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "UMinusElt":
        r = UMinusElt.one(self.datum, self.p)
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if not isinstance(other, UMinusElt):
            return NotImplemented
        return self.datum == other.datum and self.p == other.p and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.datum, self.p, frozenset(self.terms.items())))
        return self._hash

    # -- involutions ----------------------------------------------------
    def bar(self) -> "UMinusElt":
        return UMinusElt(self.datum, {k: c.bar() for k, c in self.terms.items()}, self.p)

    def star(self) -> "UMinusElt":
        return UMinusElt(self.datum, {tuple(reversed(k)): c for k, c in self.terms.items()}, self.p)

    def sigma(self, s: DiagramAutomorphism) -> "UMinusElt":
        if s.datum != self.datum:
            raise AlgebraError("automorphism belongs to a different datum")
        return UMinusElt(self.datum, {tuple((s(i), n) for i, n in k): c for k, c in self.terms.items()}, self.p)

    def reduce(self, p: int) -> "UMinusElt":
        """Coefficients reduced mod p (requires no p-divisible denominators)."""
        if self.p:
            raise AlgebraError("already reduced")
        return UMinusElt(self.datum, {k: as_coeff(c.reduce(p)) for k, c in self.terms.items()}, p)

    def map_coeffs(self, fn) -> "UMinusElt":
        return UMinusElt(self.datum, {k: fn(c) for k, c in self.terms.items()}, self.p)

    # -- equality in U_q^- ------------------------------------------------
    def shuffle_form(self) -> "ShuffleForm":
        return shuffle_normal_form(self)

    def equals(self, other: "UMinusElt") -> bool:
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return shuffle_normal_form(self).is_zero()

    # -- display --------------------------------------------------------
    def render(self) -> str:
        if not self.terms:
            return "0"
        labels = self.datum.labels
        pieces = []
        for k in sorted(self.terms):
            c = self.terms[k]
            body = "*".join(f"f{labels[i]}" if n == 1 else f"f{labels[i]}^({n})" for i, n in k)
            if not body:
                pieces.append(f"({c})" if not (isinstance(c, LaurentPoly) and c.is_constant()) else str(c))
                continue
            pieces.append(_render_coeff(c) + body)
        s = " + ".join(pieces)
        return s.replace("+ -", "- ")

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"UMinusElt({self.render()})"


def divided_power(datum: CartanDatum, i: int, n: int, p: int = 0) -> UMinusElt:
    return UMinusElt.gen(datum, i, n, p)


def multiply(x: UMinusElt, y: UMinusElt) -> UMinusElt:
    return x * y


def bar_involution(x: UMinusElt) -> UMinusElt:
    return x.bar()


def star_antiauto(x: UMinusElt) -> UMinusElt:
    return x.star()


def sigma_apply(s: DiagramAutomorphism, x: UMinusElt) -> UMinusElt:
    return x.sigma(s)


def serre_element(datum: CartanDatum, i: int, j: int, p: int = 0) -> UMinusElt:
    """sum_k (-1)^k f_i^{(k)} f_j f_i^{(N-k)} with N = 1 - 2(a_i,a_j)/(a_i,a_i)."""
    N = datum.serre_degree(i, j)
    out = UMinusElt.zero(datum, p)
    for k in range(N + 1):
        out = out + UMinusElt.word(datum, [(i, k), (j, 1), (i, N - k)], (-1) ** k, p)
    return out


# ---------------------------------------------------------------------------
# expression parser


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<gen>f(?P<lab>[A-Za-z0-9_']+?)(?=\^|\*|\s|\+|-|\)|$))|(?P<q>q)|(?P<op>[-+*^()]))"
)


class _Parser:
    def __init__(self, text: str, datum: CartanDatum, p: int):
        self.text = text
        self.datum = datum
        self.p = p
        self.pos = 0
        self.labels = sorted(datum.labels, key=len, reverse=True)

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def parse(self) -> UMinusElt:
        e = self.expr()
        if self.peek():
            raise ParseError(f"unexpected {self.peek()!r}", self.pos)
        return e

    def expr(self) -> UMinusElt:
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        acc = self.term().scale(sign)
        while self.peek() in ("+", "-") and self.peek():
            op = self.text[self.pos]
            self.pos += 1
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> UMinusElt:
        acc = self.factor()
        while self.peek() == "*":
            self.pos += 1
            acc = acc * self.factor()
        return acc

    def integer(self) -> int:
        self.peek()
        m = re.match(r"\d+", self.text[self.pos:])
        if not m:
            raise ParseError("expected an integer", self.pos)
        self.pos += m.end()
        return int(m.group())

    def signed_integer(self) -> int:
        if self.peek() == "(":
            self.pos += 1
            neg = False
            if self.peek() == "-":
                neg = True
                self.pos += 1
            v = self.integer()
            self.expect(")")
            return -v if neg else v
        if self.peek() == "-":
            self.pos += 1
            return -self.integer()
        return self.integer()

    def factor(self) -> UMinusElt:
        ch = self.peek()
        start = self.pos
        if not ch:
            raise ParseError("unexpected end of input", self.pos)
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            if self.peek() == "^":
                self.pos += 1
                e = e ** self.integer()
            return e
        if ch.isdigit():
            return UMinusElt(self.datum, {(): self.integer()}, self.p)
        if ch == "q":
            self.pos += 1
            e = 1
            if self.peek() == "^":
                self.pos += 1
                e = self.signed_integer()
            return UMinusElt(self.datum, {(): LaurentPoly.monomial(e, 1, self.p)}, self.p)
        if ch == "f":
            self.pos += 1
            for lab in self.labels:
                if self.text.startswith(lab, self.pos):
                    end = self.pos + len(lab)
                    nxt = self.text[end] if end < len(self.text) else ""
                    if nxt and (nxt.isalnum() or nxt in "_'"):
                        continue
                    self.pos = end
                    i = self.datum.index(lab)
                    n = 1
                    if self.peek() == "^":
                        self.pos += 1
                        if self.peek() == "(":
                            self.pos += 1
                            n = self.integer()
                            self.expect(")")
                            return UMinusElt.gen(self.datum, i, n, self.p)
                        # plain power f_i^n
                        return UMinusElt.gen(self.datum, i, 1, self.p) ** self.integer()
                    return UMinusElt.gen(self.datum, i, 1, self.p)
            m = re.match(r"[A-Za-z0-9_']*", self.text[self.pos:])
            raise ParseError(f"unknown generator index {m.group()!r}", start)
        raise ParseError(f"unexpected {ch!r}", self.pos)


def parse_expression(text: str, datum: CartanDatum, p: int = 0) -> UMinusElt:
    """Parse ``f1*f2^(2)*f1 - q^2*f1^(2)*f2^(2)``.

    ``fi^(n)`` is a divided power, ``fi^n`` an ordinary power, ``q^k`` a
    monomial (``q^(-k)`` or ``q^-k`` for negative k); unknown generator
    labels raise :class:`ParseError` with the offending position.
    """
    return _Parser(text, datum, p).parse()


# ---------------------------------------------------------------------------
# quantum shuffle embedding

RawVec = dict  # word -> {exponent: int}


class ShuffleForm:
    """Image of an element of U_q^- in the free module on words.

    ``coords`` maps words to nonzero coefficients.  Two elements are equal in
    U_q^- exactly when their shuffle forms agree.
    """

    __slots__ = ("datum", "p", "coords")

    def __init__(self, datum: CartanDatum, coords: Mapping[Word, Coeff], p: int = 0):
        self.datum = datum
        self.p = p
        self.coords = {w: c for w, c in coords.items() if not _is_zero(c)}

    def is_zero(self) -> bool:
        return not self.coords

    def weights(self) -> set[tuple[int, ...]]:
        r = self.datum.rank
        out = set()
        for w in self.coords:
            v = [0] * r
            for i in w:
                v[i] += 1
            out.add(tuple(v))
        return out

    def get(self, w: Word) -> Coeff:
        return self.coords.get(tuple(w), LaurentPoly.const(0, self.p))

    def __eq__(self, other):
        if not isinstance(other, ShuffleForm):
            return NotImplemented
        if self.coords.keys() != other.coords.keys():
            return False
        return all(self.coords[w] == other.coords[w] for w in self.coords)

    def __sub__(self, other: "ShuffleForm") -> "ShuffleForm":
        c = dict(self.coords)
        for w, v in other.coords.items():
            c[w] = c[w] - v if w in c else -v
        return ShuffleForm(self.datum, c, self.p)

    def is_laurent(self) -> bool:
        return all(isinstance(c, LaurentPoly) for c in self.coords.values())

    def __repr__(self) -> str:
        return f"ShuffleForm({len(self.coords)} words)"


def _raw_insert(vec: RawVec, i: int, P: Sequence[Sequence[int]]) -> RawVec:
    """psi(x f_i) from psi(x): insert i at each slot p with q^{-(a_i, wt w[p:])}."""
    out: RawVec = {}
    Pi = P[i]
    for w, poly in vec.items():
        shift = 0
        L = len(w)
        for pos in range(L, -1, -1):
            if pos < L:
                shift -= Pi[w[pos]]
            nw = w[:pos] + (i,) + w[pos:]
            tgt = out.get(nw)
            if tgt is None:
                out[nw] = {e + shift: c for e, c in poly.items()}
            else:
                for e, c in poly.items():
                    e2 = e + shift
                    tgt[e2] = tgt.get(e2, 0) + c
    return out


def _raw_clean(vec: RawVec) -> RawVec:
    out = {}
    for w, poly in vec.items():
        p2 = {e: c for e, c in poly.items() if c}
        if p2:
            out[w] = p2
    return out


class _ShuffleCache:
    """Per-datum cache of psi on divided-power keys; idempotent inserts."""

    def __init__(self, maxsize: int = 4096):
        self._lock = threading.Lock()
        self._data: dict = {}
        self.maxsize = maxsize

    def get(self, k):
        return self._data.get(k)

    def put(self, k, v):
        with self._lock:
            if len(self._data) >= self.maxsize:
                self._data.clear()
            self._data.setdefault(k, v)


_cache = _ShuffleCache()


def psi_key(datum: CartanDatum, key: Key) -> dict[Word, LaurentPoly]:
    """Shuffle image of a single divided-power word, over Z[q^+-1]."""
    ck = (datum.pairing, key)
    hit = _cache.get(ck)
    if hit is not None:
        return hit
    if key:
        prefix = psi_key(datum, key[:-1])
        vec: RawVec = {w: dict(c.items()) for w, c in prefix.items()}
        i, n = key[-1]
        for _ in range(n):
            vec = _raw_insert(vec, i, datum.pairing)
        vec = _raw_clean(vec)
        res: dict[Word, LaurentPoly] = {}
        f = qfact(n, datum.d(i))
        for w, poly in vec.items():
            lp = LaurentPoly(poly)
            res[w] = lp.exact_div(f) if n > 1 else lp
    else:
        res = {(): LaurentPoly.const(1)}
    _cache.put(ck, res)
    return res


def shuffle_normal_form(x: UMinusElt) -> ShuffleForm:
    acc: dict[Word, Coeff] = {}
    p = x.p
    for key, c in x.terms.items():
        img = psi_key(x.datum, key)
        for w, v in img.items():
            if p:
                v = v.reduce(p)
            t = v * c
            acc[w] = acc[w] + t if w in acc else t
    return ShuffleForm(x.datum, {w: as_coeff(c) for w, c in acc.items()}, p)


def psi(x: UMinusElt) -> ShuffleForm:
    return shuffle_normal_form(x)


def words_of_weight(nu: Sequence[int]) -> list[Word]:
    """All words with letter multiplicities nu, in lexicographic order."""
    nu = list(nu)
    total = sum(nu)
    out: list[Word] = []

    def rec(prefix: list[int], remaining: list[int], left: int):
        if not left:
            out.append(tuple(prefix))
            return
        for i, r in enumerate(remaining):
            if r:
                remaining[i] -= 1
                prefix.append(i)
                rec(prefix, remaining, left - 1)
                prefix.pop()
                remaining[i] += 1

    rec([], nu, total)
    return out


def plain_expansion(x: UMinusElt) -> dict[Word, Coeff]:
    """Rewrite divided powers as f_i^n / [n]!_i; coefficients may become rational."""
    acc: dict[Word, Coeff] = {}
    for key, c in x.terms.items():
        den = LaurentPoly.const(1, x.p)
        for i, n in key:
            if n > 1:
                den = den * qfact(n, x.datum.d(i), x.p)
        v = as_coeff(RatFn(c) / den) if den != 1 else c
        w = key_word(key)
        acc[w] = acc[w] + v if w in acc else v
    return {w: as_coeff(c) for w, c in acc.items() if not _is_zero(c)}


# ---------------------------------------------------------------------------
# bilinear form and coproduct


def _norm_factor(datum: CartanDatum, nu: Sequence[int], p: int = 0) -> RatFn:
    den = LaurentPoly.const(1, p)
    for i, m in enumerate(nu):
        f = LaurentPoly({0: 1, 2 * datum.d(i): -1}, p)
        for _ in range(m):
            den = den * f
    return RatFn(LaurentPoly.const(1, p), den)


def bilinear_form(x: UMinusElt, y: UMinusElt) -> Coeff:
    """The symmetric form with (f_i, f_j) = delta_ij / (1 - q_i^2)."""
    x._check(y)
    if not x.terms or not y.terms:
        return LaurentPoly.const(0, x.p)
    sx = shuffle_normal_form(x)
    py = plain_expansion(y)
    per_weight: dict[tuple[int, ...], Coeff] = {}
    rank = x.datum.rank
    for w, cy in py.items():
        cx = sx.coords.get(w)
        if cx is None:
            continue
        nu = [0] * rank
        for i in w:
            nu[i] += 1
        nu = tuple(nu)
        t = cx * cy
        per_weight[nu] = per_weight[nu] + t if nu in per_weight else t
    total = RatFn(LaurentPoly.const(0, x.p))
    for nu, s in per_weight.items():
        total = total + _norm_factor(x.datum, nu, x.p) * s
    return as_coeff(total)


def gram_matrix(elements: Sequence[UMinusElt]) -> list[list[Coeff]]:
    n = len(elements)
    G: list[list] = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            v = bilinear_form(elements[a], elements[b])
            G[a][b] = G[b][a] = v
    return G


Tensor = dict  # (Word, Word) -> Coeff, plain words on both sides


def coproduct_r(x: UMinusElt) -> Tensor:
    """r(x) as a sum of plain-word tensors f_u (x) f_v."""
    out: Tensor = {}
    P = x.datum.pairing
    for w, c in plain_expansion(x).items():
        L = len(w)
        for mask in range(1 << L):
            left = tuple(w[k] for k in range(L) if not mask >> k & 1)
            right = tuple(w[k] for k in range(L) if mask >> k & 1)
            e = 0
            # right letter b placed before left letter c
            for b in range(L):
                if mask >> b & 1:
                    for cc in range(b + 1, L):
                        if not mask >> cc & 1:
                            e -= P[w[b]][w[cc]]
            t = c * LaurentPoly.monomial(e, 1, x.p)
            k = (left, right)
            out[k] = out[k] + t if k in out else t
    return {k: as_coeff(v) for k, v in out.items() if not _is_zero(v)}


def tensor_from_pairs(datum: CartanDatum, pairs: Iterable[tuple[Coeff, UMinusElt, UMinusElt]], p: int = 0) -> Tensor:
    """sum c * a (x) b with a, b expanded into plain words."""
    out: Tensor = {}
    for c, a, b in pairs:
        ea, eb = plain_expansion(a), plain_expansion(b)
        for u, cu in ea.items():
            for v, cv in eb.items():
                t = _coerce(c, p) * cu * cv
                k = (u, v)
                out[k] = out[k] + t if k in out else t
    return {k: as_coeff(v) for k, v in out.items() if not _is_zero(v)}


def tensor_shuffle_form(datum: CartanDatum, t: Tensor, p: int = 0) -> dict[tuple[Word, Word], Coeff]:
    """Apply psi (x) psi, giving a canonical form for U_q^- (x) U_q^-."""
    cache: dict[Word, dict] = {}

    def img(w: Word):
        if w not in cache:
            # a plain word f_w equals m * (merged divided-power key)
            key, m = merge_key([(i, 1) for i in w], datum)
            base = psi_key(datum, key)
            cache[w] = base if m == 1 else {u: v * m for u, v in base.items()}
        return cache[w]

    out: dict = {}
    for (u, v), c in t.items():
        for u2, cu in img(u).items():
            for v2, cv in img(v).items():
                val = c * cu * cv
                if p:
                    val = as_coeff(val.reduce(p)) if not isinstance(val, int) else val
                k = (u2, v2)
                out[k] = out[k] + val if k in out else val
    return {k: as_coeff(v) for k, v in out.items() if not _is_zero(v)}


def tensors_equal(datum: CartanDatum, a: Tensor, b: Tensor, p: int = 0) -> bool:
    diff = dict(a)
    for k, v in b.items():
        diff[k] = diff[k] - v if k in diff else -v
    diff = {k: v for k, v in diff.items() if not _is_zero(v)}
    return not tensor_shuffle_form(datum, diff, p)


# ---------------------------------------------------------------------------
# triangular U_q and braid operators

FKE = tuple[Word, tuple[int, ...], Word]


def _wt(word: Word, rank: int) -> list[int]:
    v = [0] * rank
    for i in word:
        v[i] += 1
    return v


class UqFullElt:
    """Element of U_q in the normal order F-word * K_lambda * E-word.

    K_lambda is indexed by lambda in the root lattice (simple-root
    coordinates); K_lambda E_j = q^{(lambda, a_j)} E_j K_lambda and
    K_lambda F_j = q^{-(lambda, a_j)} F_j K_lambda.
    """

    __slots__ = ("datum", "p", "terms")

    def __init__(self, datum: CartanDatum, terms: Mapping[FKE, Coeff] | None = None, p: int = 0):
        self.datum = datum
        self.p = p
        self.terms = {}
        if terms:
            for k, c in terms.items():
                c = _coerce(c, p)
                if not _is_zero(c):
                    self.terms[k] = c

    @classmethod
    def scalar(cls, datum, c=1, p: int = 0) -> "UqFullElt":
        return cls(datum, {((), (0,) * datum.rank, ()): c}, p)

    @classmethod
    def F(cls, datum, i: int, p: int = 0) -> "UqFullElt":
        return cls(datum, {((i,), (0,) * datum.rank, ()): 1}, p)

    @classmethod
    def E(cls, datum, i: int, p: int = 0) -> "UqFullElt":
        return cls(datum, {((), (0,) * datum.rank, (i,)): 1}, p)

    @classmethod
    def K(cls, datum, lam: Sequence[int], p: int = 0) -> "UqFullElt":
        return cls(datum, {((), tuple(lam), ()): 1}, p)

    @classmethod
    def from_uminus(cls, x: UMinusElt) -> "UqFullElt":
        zero = (0,) * x.datum.rank
        return cls(x.datum, {(w, zero, ()): c for w, c in plain_expansion(x).items()}, x.p)

    def is_zero_expression(self) -> bool:
        return not self.terms

    def canonical(self) -> dict[tuple[tuple[int, ...], Word, Word], Coeff]:
        """Coordinates in psi(U^-) (x) U^0 (x) psi(U^+): exact modulo the Serre ideals."""
        out: dict = {}
        D = self.datum
        imgs: dict[Word, dict] = {}

        def img(w: Word):
            if w not in imgs:
                key, m = merge_key([(i, 1) for i in w], D)
                base = psi_key(D, key)
                imgs[w] = base if m == 1 else {u: v * m for u, v in base.items()}
            return imgs[w]

        for (Fw, lam, Ew), c in self.terms.items():
            for u, cu in img(Fw).items():
                for v, cv in img(Ew).items():
                    t = cu * cv
                    if self.p:
                        t = t.reduce(self.p)
                    t = c * t
                    k = (lam, u, v)
                    out[k] = out[k] + t if k in out else t
        return {k: v for k, v in out.items() if not _is_zero(v)}

    def is_zero(self) -> bool:
        return not self.canonical()

    def __add__(self, other: "UqFullElt") -> "UqFullElt":
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t[k] + c if k in t else c
        return UqFullElt(self.datum, t, self.p)

    def __neg__(self):
        return UqFullElt(self.datum, {k: -c for k, c in self.terms.items()}, self.p)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "UqFullElt":
        c = _coerce(c, self.p)
        return UqFullElt(self.datum, {k: v * c for k, v in self.terms.items()}, self.p)

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly, RatFn)):
            return self.scale(other)
        D = self.datum
        rank = D.rank
        out: dict[FKE, Coeff] = {}
        for (F1, l1, E1), c1 in self.terms.items():
            for (F2, l2, E2), c2 in other.terms.items():
                for (Fm, lm, Em), cm in _normal_EF(D, E1, F2).items():
                    wf = _wt(Fm, rank)
                    we = _wt(Em, rank)
                    e = -D.form(l1, wf) - D.form(l2, we)
                    lam = tuple(a + b + c for a, b, c in zip(l1, lm, l2))
                    k = (F1 + Fm, lam, Em + E2)
                    t = c1 * c2 * cm * LaurentPoly.monomial(e, 1, self.p) if e else c1 * c2 * cm
                    out[k] = out[k] + t if k in out else t
        return UqFullElt(D, out, self.p)

    def __rmul__(self, other):
        if isinstance(other, (int, LaurentPoly, RatFn)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, UqFullElt):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __repr__(self) -> str:
        return f"UqFullElt({len(self.terms)} terms)"


_ef_cache: dict = {}
_ef_lock = threading.Lock()


def _normal_EF(D: CartanDatum, E: Word, F: Word) -> dict[FKE, Coeff]:
    """Normal form of E-word * F-word over Q(q) (cached)."""
    rank = D.rank
    zero = (0,) * rank
    if not E or not F:
        return {(F, zero, E): LaurentPoly.const(1)}
    ck = (D.pairing, E, F)
    hit = _ef_cache.get(ck)
    if hit is not None:
        return hit
    P = D.pairing
    i = E[-1]
    rest = E[:-1]
    di = D.d(i)
    qi_diff = RatFn(LaurentPoly.const(1), LaurentPoly({di: 1, -di: -1}))
    # E_i F_w = F_w E_i + sum_k F_{w minus k} (q^{-t} K_i - q^{t} K_{-i}) / (q_i - q_i^-1)
    pieces: list[tuple[Word, tuple[int, ...], Word, Coeff]] = [(F, zero, (i,), LaurentPoly.const(1))]
    ai = tuple(1 if k == i else 0 for k in range(rank))
    mai = tuple(-x for x in ai)
    for k, letter in enumerate(F):
        if letter != i:
            continue
        tail = F[k + 1:]
        t = sum(P[i][b] for b in tail)
        w = F[:k] + tail
        pieces.append((w, ai, (), qi_diff * LaurentPoly.monomial(-t)))
        pieces.append((w, mai, (), -qi_diff * LaurentPoly.monomial(t)))
    out: dict[FKE, Coeff] = {}
    for w, lam, etail, c in pieces:
        for (Fm, lm, Em), cm in _normal_EF(D, rest, w).items():
            # (Fm K_lm Em) K_lam etail = q^{-(lam, wt Em)} Fm K_{lm+lam} Em etail
            e = -D.form(lam, _wt(Em, rank))
            key = (Fm, tuple(a + b for a, b in zip(lm, lam)), Em + etail)
            v = c * cm * LaurentPoly.monomial(e) if e else c * cm
            out[key] = out[key] + v if key in out else v
    res = {k: as_coeff(v) for k, v in out.items() if not _is_zero(v)}
    with _ef_lock:
        _ef_cache.setdefault(ck, res)
    return res


def _divpow_full(D: CartanDatum, kind: str, i: int, n: int, p: int) -> UqFullElt:
    zero = (0,) * D.rank
    word = (i,) * n
    k = (word, zero, ()) if kind == "F" else ((), zero, word)
    c = RatFn(LaurentPoly.const(1), qfact(n, D.d(i))) if n > 1 else LaurentPoly.const(1)
    if p:
        c = c.reduce(p)
    return UqFullElt(D, {k: c}, p)


@lru_cache(maxsize=None)
def _braid_generator(D: CartanDatum, i: int, kind: str, j: int, direction: int, p: int) -> UqFullElt:
    """Image of E_j or F_j under T_i^{direction} (Lusztig's T''_{i,1})."""
    rank = D.rank
    P = D.pairing
    zero = (0,) * rank
    ai = tuple(1 if k == i else 0 for k in range(rank))
    mai = tuple(-x for x in ai)
    aii = P[i][i]
    if j == i:
        if direction == 1:
            # T(E_i) = -F_i K_i ; T(F_i) = -K_{-i} E_i
            if kind == "E":
                return UqFullElt(D, {((i,), ai, ()): -1}, p)
            return UqFullElt(D, {((), mai, (i,)): -1}, p)
        # T^-1(E_i) = -K_{-i} F_i = -q^{(a_i,a_i)} F_i K_{-i} ; T^-1(F_i) = -E_i K_i = -q^{-(a_i,a_i)} K_i E_i
        if kind == "E":
            return UqFullElt(D, {((i,), mai, ()): -LaurentPoly.monomial(aii)}, p)
        return UqFullElt(D, {((), ai, (i,)): -LaurentPoly.monomial(-aii)}, p)
    N = -2 * P[i][j] // aii
    di = D.d(i)
    gen_j = UqFullElt(D, {(((j,), zero, ()) if kind == "F" else ((), zero, (j,))): 1}, p)
    total = UqFullElt(D, {}, p)
    for r in range(N + 1):
        s = N - r
        if kind == "E":
            coeff = LaurentPoly.monomial(-di * r, (-1) ** r)
            A, B = (_divpow_full(D, "E", i, s, p), _divpow_full(D, "E", i, r, p))
        else:
            coeff = LaurentPoly.monomial(di * r, (-1) ** r)
            A, B = (_divpow_full(D, "F", i, r, p), _divpow_full(D, "F", i, s, p))
        if direction == -1:
            A, B = B, A
        total = total + (A * gen_j * B).scale(coeff)
    return total


def braid_T(i: int, x: UqFullElt | UMinusElt, direction: int = 1) -> UqFullElt:
    """Lusztig's symmetry T''_{i,1} (direction=+1) or its inverse (direction=-1)."""
    if isinstance(x, UMinusElt):
        x = UqFullElt.from_uminus(x)
    if direction not in (1, -1):
        raise AlgebraError("direction must be +1 or -1")
    D = x.datum
    out = UqFullElt(D, {}, x.p)
    for (Fw, lam, Ew), c in x.terms.items():
        acc = UqFullElt.scalar(D, c, x.p)
        for j in Fw:
            acc = acc * _braid_generator(D, i, "F", j, direction, x.p)
        acc = acc * UqFullElt.K(D, D.reflect(i, lam), x.p)
        for j in Ew:
            acc = acc * _braid_generator(D, i, "E", j, direction, x.p)
        out = out + acc
    return out


def extract_uminus(x: UqFullElt) -> UMinusElt:
    """The element as a member of U_q^-; raises :class:`LeftUMinus` otherwise."""
    zero = (0,) * x.datum.rank
    rest = UqFullElt(x.datum, {k: c for k, c in x.terms.items() if k[1] != zero or k[2]}, x.p)
    if rest.terms and not rest.is_zero():
        raise LeftUMinus("element left U_q^-: nontrivial K or E part survives")
    terms: dict[Key, Coeff] = {}
    for (Fw, lam, Ew), c in x.terms.items():
        if lam != zero or Ew:
            continue
        key, m = merge_key([(i, 1) for i in Fw], x.datum)
        # merge_key returned f_i f_i = [2] f_i^{(2)}
        v = c * m
        terms[key] = terms[key] + v if key in terms else v
    return UMinusElt(x.datum, terms, x.p)


def braid_word(word: Sequence[int], x: UMinusElt | UqFullElt, direction: int = 1) -> UqFullElt:
    """T_{w1} T_{w2} ... T_{wk}(x) (rightmost applied first)."""
    y = UqFullElt.from_uminus(x) if isinstance(x, UMinusElt) else x
    for i in reversed(tuple(word)):
        y = braid_T(i, y, direction)
    return y


def wt_T_eta(s: DiagramAutomorphism, eta: int, x: UMinusElt | UqFullElt, direction: int = 1, order: Sequence[int] | None = None) -> UqFullElt:
    """The folded braid operator for the sigma-orbit eta.

    Product of T_i over the orbit when the orbit is totally disconnected,
    T_i T_j T_i when it is a joined pair.  ``order`` overrides the letter
    sequence (used to check independence of choices).
    """
    word = tuple(order) if order is not None else s.block(eta)
    if direction == -1:
        word = tuple(reversed(word))
    return braid_word(word, x, direction)
