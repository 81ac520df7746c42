"""Affine root systems under a diagram automorphism.

Covers the orbit map O with its doubling rule, the Sigma-set classification
of finite positive roots, the partition/bijection between equivalence
classes of real roots and the real roots of the folded system, infinite
reduced words lifted block-wise from the folded system, and the convexity
check of the resulting total order on positive roots.

All vectors are integer tuples over the simple roots of the relevant datum.
O-images live in the sigma-fixed part of the upstairs lattice; ``to_folded``
converts them to coordinates over the folded simple roots.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .cartan import CartanDatum, DiagramAutomorphism, Preset, epsilon_A, epsilon_D, preset
from .report import Report

Vec = tuple[int, ...]


class AffineError(ValueError):
    pass


class ConvexityError(AffineError):
    pass


def _add(a: Sequence[int], b: Sequence[int], k: int = 1) -> Vec:
    return tuple(x + k * y for x, y in zip(a, b))


def _scale(a: Sequence[int], k: int) -> Vec:
    return tuple(k * x for x in a)


def _is_pos(v: Sequence[int]) -> bool:
    return all(x >= 0 for x in v) and any(v)


def _is_neg(v: Sequence[int]) -> bool:
    return all(x <= 0 for x in v) and any(v)


# ---------------------------------------------------------------------------
# affine systems


class AffineSystem:
    """An irreducible affine datum with a distinguished node 0.

    ``zero`` must carry Kac mark 1, so every real root is x + m*delta with
    x supported on the finite nodes.
    """

    def __init__(self, datum: CartanDatum, zero: int = 0, finite_type: str | None = None):
        if not datum.is_affine:
            raise AffineError(f"{datum.name} is not of affine type")
        self.datum = datum
        self.zero = zero
        self.delta: Vec = tuple(datum.null_root)
        if self.delta[zero] != 1:
            raise AffineError(f"node {datum.labels[zero]} has Kac mark {self.delta[zero]}, expected 1")
        self.rank = datum.rank
        self.finite_nodes = tuple(i for i in range(self.rank) if i != zero)
        self.finite_type = finite_type

    @cached_property
    def finite_datum(self) -> CartanDatum:
        F = self.finite_nodes
        P = self.datum.pairing
        return CartanDatum.from_matrix([self.datum.labels[i] for i in F],
                                       [[P[i][j] for j in F] for i in F], f"{self.datum.name}_0")

    def embed(self, x: Sequence[int]) -> Vec:
        """Finite-datum coordinates to affine coordinates (0 at node zero)."""
        out = [0] * self.rank
        for k, i in enumerate(self.finite_nodes):
            out[i] = x[k]
        return tuple(out)

    def restrict(self, v: Sequence[int]) -> Vec:
        return tuple(v[i] for i in self.finite_nodes)

    @cached_property
    def finite_positive(self) -> tuple[Vec, ...]:
        return tuple(self.embed(r) for r in self.finite_datum.positive_roots)

    @cached_property
    def finite_lengths(self) -> dict:
        return {r: self.datum.form(r, r) for r in self.finite_positive}

    def long_short(self) -> tuple[set, set]:
        """Positive long and short finite roots (single-length: by finite_type, default long)."""
        lens = set(self.finite_lengths.values())
        roots = set(self.finite_positive)
        if len(lens) == 1:
            if self.finite_type == "B":
                return set(), roots
            return roots, set()
        hi = max(lens)
        long_ = {r for r, l in self.finite_lengths.items() if l == hi}
        return long_, roots - long_

    def level(self, v: Sequence[int]) -> int:
        return v[self.zero]

    def finite_part(self, v: Sequence[int]) -> Vec:
        return _add(v, self.delta, -v[self.zero])

    def coroot_pairing(self, v: Sequence[int], i: int) -> Fraction:
        a = self.datum.simple_root(i)
        return Fraction(2 * self.datum.form(v, a), self.datum.form(a, a))

    def is_real_root(self, v: Sequence[int]) -> bool:
        """Reflection descent: a positive real root reduces to a simple root."""
        v = tuple(v)
        neg = _is_neg(v)
        if neg:
            v = _scale(v, -1)
        if not _is_pos(v):
            return False
        if self.datum.form(v, v) <= 0:
            return False
        while True:
            if sum(v) == 1:
                return True
            for i in range(self.rank):
                c = self.coroot_pairing(v, i)
                if c > 0:
                    if c.denominator != 1:
                        return False
                    v = _add(v, self.datum.simple_root(i), -int(c))
                    break
            else:
                return False
            if not _is_pos(v):
                return False

    def is_imaginary(self, v: Sequence[int]) -> bool:
        v = tuple(v)
        k = v[self.zero]
        return k != 0 and v == _scale(self.delta, k)

    def is_positive_root(self, v: Sequence[int]) -> bool:
        return _is_pos(v) and (self.is_real_root(v) or self.is_imaginary(v))

    def candidates(self, M: int) -> list[Vec]:
        fin = list(self.finite_positive)
        _, short = self.long_short()
        pieces = fin + [_scale(r, -1) for r in fin]
        pieces += [_scale(r, 2) for r in short] + [_scale(r, -2) for r in short]
        out = []
        for m in range(M + 1):
            for x in pieces:
                v = _add(x, self.delta, m)
                if _is_pos(v):
                    out.append(v)
        return out

    def enumerate_real_positive(self, M: int) -> list[Vec]:
        """Positive real roots x + m*delta with 0 <= m <= M (m >= 1 when x < 0)."""
        if M < 0:
            raise AffineError("level bound must be non-negative")
        return sorted({v for v in self.candidates(M) if self.is_real_root(v)}, key=lambda v: (self.level(v), v))

    def length_class(self, v: Sequence[int]) -> str:
        """'s', 'l' or '2s' by squared length relative to the shortest real root."""
        lens = sorted({self.datum.form(r, r) for r in self.finite_positive})
        n = self.datum.form(v, v)
        if n == lens[0]:
            return "s" if len(lens) > 1 or self.finite_type == "B" else "l"
        if n == lens[-1]:
            return "l"
        if n == 4 * lens[0]:
            return "2s"
        raise AffineError(f"unexpected root length {n}")

    # -- Weyl group words ---------------------------------------------------
    def apply_word(self, word: Sequence[int], v: Sequence[int]) -> Vec:
        """s_{w_1} ... s_{w_r}(v)."""
        v = tuple(v)
        for i in reversed(word):
            v = self.datum.reflect(i, v)
        return v

    def translation_matrix(self, p: Sequence[int]) -> list[Vec]:
        """Images of simple roots under x -> x - <lambda, xbar> delta with pairings p on finite nodes."""
        cols = []
        tot = 0
        for k, i in enumerate(self.finite_nodes):
            tot += self.delta[i] * p[k]
        for i in range(self.rank):
            a = self.datum.simple_root(i)
            if i == self.zero:
                cols.append(_add(a, self.delta, tot))
            else:
                cols.append(_add(a, self.delta, -p[self.finite_nodes.index(i)]))
        return cols

    def reduced_word_of(self, cols: Sequence[Sequence[int]], max_len: int = 2000) -> tuple[int, ...] | None:
        """Reduced word of the linear map with given images of simple roots, if it lies in W."""
        W = [tuple(c) for c in cols]
        if not all(self.is_real_root(c) for c in W):
            return None
        rec = []
        for _ in range(max_len):
            i = next((i for i in range(self.rank) if _is_neg(W[i])), None)
            if i is None:
                break
            # W <- W s_i: s_i(a_j) = a_j - a_ij a_i
            Wi = W[i]
            W = [tuple(x - self.datum.cartan_entry(j, i) * y for x, y in zip(W[j], Wi)) for j in range(self.rank)]
            rec.append(i)
        else:
            return None
        if any(W[j] != self.datum.simple_root(j) for j in range(self.rank)):
            return None
        return tuple(reversed(rec))

    @cached_property
    def translation_word(self) -> tuple[int, ...]:
        """A reduced word of a translation whose left-reading inversions have positive finite part."""
        nf = len(self.finite_nodes)
        for N in range(1, 9):
            dmax = max(self.datum.d(i) for i in self.finite_nodes)
            shapes = ([1] * nf, [self.datum.d(i) for i in self.finite_nodes],
                      [dmax // self.datum.d(i) for i in self.finite_nodes])
            for p in ([N * x for x in shape] for shape in shapes):
                for sgn in (1, -1):
                    word = self.reduced_word_of(self.translation_matrix([sgn * x for x in p]))
                    if word and self._left_side_ok(word):
                        return word
        raise AffineError(f"no translation word found for {self.datum.name}")

    def _left_side_ok(self, word: Sequence[int]) -> bool:
        betas = InfiniteWord(self, word).left(len(word))
        return all(_is_pos(self.finite_part(b)) for b in betas)


class InfiniteWord:
    """The periodic word (..., P, P, P, ...) with i_1 = P[0] and i_0 = P[-1].

    ``left(K)`` returns beta_0, beta_{-1}, ..., beta_{-K+1} and ``right(K)``
    returns beta_1, ..., beta_K.
    """

    def __init__(self, system, period: Sequence[int]):
        self.sys = system
        self.period = tuple(period)

    def letter(self, k: int) -> int:
        L = len(self.period)
        return self.period[(k - 1) % L]

    def _walk(self, letters: Iterable[int]) -> list[Vec]:
        D = self.sys.datum
        n = D.rank
        # columns of the running product w = s_{a_1} s_{a_2} ...
        W = [D.simple_root(j) for j in range(n)]
        out = []
        for i in letters:
            out.append(W[i])
            Wi = W[i]
            W = [tuple(x - D.cartan_entry(j, i) * y for x, y in zip(W[j], Wi)) for j in range(n)]
        return out

    def left(self, K: int) -> list[Vec]:
        return self._walk(self.letter(k) for k in range(0, -K, -1))

    def right(self, K: int) -> list[Vec]:
        return self._walk(self.letter(k) for k in range(1, K + 1))


# ---------------------------------------------------------------------------
# the orbit map and Sigma sets

CASES = {
    # case letter -> (preset label, folded finite type, Sigma labels that occur)
    "A": ("A_a1", "B", ("s", "l", "l'", "2s'", "2s''", "0")),
    "B": ("A_n2", "C", ("s", "l", "s'", "l'", "l''", "l'''", "0")),
    "C": ("A_n1", "C", ("s", "l", "s'", "l''", "0")),
    "D": ("A_n4", "C", ("s", "l", "l''", "0")),
}

SIGMA_LABELS = ("s", "l", "l'", "l''", "l'''", "s'", "2s'", "2s''", "0")


@dataclass(frozen=True)
class OrbitImage:
    vector: Vec  # sigma-fixed upstairs vector
    doubled: bool
    folded: tuple  # coordinates over the folded simple roots (Fractions)

    def render(self) -> str:
        return "(" + ",".join(str(x) for x in self.folded) + ")" + ("*" if self.doubled else "")


@dataclass(frozen=True)
class Membership:
    """beta lies in sigma^i{m delta + sign*alpha} with alpha in Sigma_label^+."""

    label: str
    m: int
    primed: bool

    def render(self) -> str:
        head = "S'" if self.primed else "S"
        return f"{head}_{self.label}({self.m})"


class AffineFolding:
    """Upstairs affine system, sigma, the orbit map O and the folded system."""

    def __init__(self, case: str, n: int):
        case = case.upper()
        if case not in CASES:
            raise AffineError(f"unknown case {case!r}; expected one of A, B, C, D")
        label, ftype, allowed = CASES[case]
        if case == "D" and n < 1 or case != "D" and n < 2:
            raise AffineError(f"case {case} needs n >= {1 if case == 'D' else 2}")
        self.case = case
        self.n = n
        self.preset: Preset = preset(label, n)
        self.X = self.preset.X
        self.sigma: DiagramAutomorphism = self.preset.sigma
        self.up = AffineSystem(self.X, 0)
        self.allowed = allowed
        self.excluded = (case == "D" and n == 1) or (case == "B" and n == 2)
        self.folded_datum = self.sigma.fold()
        self.eta0 = self.sigma.orbit_index[0]
        self.down = AffineSystem(self.folded_datum, self.eta0, ftype)
        self._O: dict = {}

    # -- sigma orbits --------------------------------------------------------
    def orbit(self, v: Sequence[int]) -> list[Vec]:
        v = tuple(v)
        out = [v]
        cur = self.sigma.apply_root(v)
        while cur != v:
            out.append(cur)
            cur = self.sigma.apply_root(cur)
        return out

    def sigma_inv_power(self, v: Sequence[int], i: int) -> Vec:
        k = (-i) % self.sigma.order
        v = tuple(v)
        for _ in range(k):
            v = self.sigma.apply_root(v)
        return v

    def _is_pair_sum(self, g: Vec) -> bool:
        """g = b + sigma(b) for a real root b with orbit {b, sigma b} of size 2."""
        hd = sum(self.up.delta)
        hg = sum(g)
        if hg % 2:
            return False
        half = hg // 2
        for x in self.up.finite_positive:
            for s in (1, -1):
                xs = _scale(x, s)
                r = half - sum(xs)
                if r % hd:
                    continue
                b = _add(xs, self.up.delta, r // hd)
                if not _is_pos(b):
                    continue
                sb = self.sigma.apply_root(b)
                if sb != b and self.sigma.apply_root(sb) == b and _add(b, sb) == g:
                    return True
        return False

    def O(self, v: Sequence[int]) -> OrbitImage:
        v = tuple(v)
        hit = self._O.get(v)
        if hit is not None:
            return hit
        orb = self.orbit(v)
        doubled = False
        if len(orb) == 2 and self.up.is_real_root(_add(orb[0], orb[1])):
            w = _scale(_add(orb[0], orb[1]), 2)
            doubled = True
        elif len(orb) == 1 and self.up.is_real_root(v) and self._is_pair_sum(v):
            w = _scale(v, 2)
            doubled = True
        else:
            w = tuple(sum(c) for c in zip(*orb))
        img = OrbitImage(w, doubled, self.to_folded(w))
        self._O[v] = img
        return img

    @cached_property
    def alpha_tilde(self) -> list[Vec]:
        out = []
        for orb in self.sigma.orbits:
            out.append(self.O(self.X.simple_root(orb[0])).vector)
        return out

    def to_folded(self, w: Sequence[int]) -> tuple:
        # alpha_tilde uses O on simple roots, which only needs the vector part
        if not hasattr(self, "_at"):
            at = []
            for orb in self.sigma.orbits:
                a = self.X.simple_root(orb[0])
                o = self.orbit(a)
                if len(o) == 2 and self.up.is_real_root(_add(o[0], o[1])):
                    at.append(_scale(_add(o[0], o[1]), 2))
                else:
                    at.append(tuple(sum(c) for c in zip(*o)))
            self._at = at
        coords = []
        for eta, orb in enumerate(self.sigma.orbits):
            i = orb[0]
            coords.append(Fraction(w[i], self._at[eta][i]))
        back = [sum(c * a[j] for c, a in zip(coords, self._at)) for j in range(len(w))]
        if back != list(w):
            raise AffineError(f"{tuple(w)} is not in the span of the orbit vectors")
        return tuple(coords)

    def folded_int(self, w: Sequence[int]) -> Vec:
        c = self.to_folded(w)
        if any(x.denominator != 1 for x in c):
            raise AffineError(f"{tuple(w)} is not integral over the folded simple roots")
        return tuple(int(x) for x in c)

    # -- the folded finite system inside Q^sigma --------------------------------
    @cached_property
    def delta0_prime(self) -> list[Vec]:
        eta0 = set(self.sigma.orbits[self.eta0])
        return [r for r in self.up.finite_positive if all(r[i] == 0 for i in eta0)]

    @cached_property
    def folded_finite(self) -> dict:
        """O(Delta_0'^+) split by length: {'l': set, 's': set} of upstairs vectors."""
        imgs = {self.O(r).vector for r in self.delta0_prime}
        lens = {w: self.X.form(w, w) for w in imgs}
        L = set(lens.values())
        if len(L) == 1:
            key = "s" if self.down.finite_type == "B" else "l"
            return {"l": imgs if key == "l" else set(), "s": imgs if key == "s" else set()}
        hi = max(L)
        return {"l": {w for w in imgs if lens[w] == hi}, "s": {w for w in imgs if lens[w] != hi}}

    def _height(self, w: Vec) -> Fraction:
        return sum(self.to_folded(w))

    @cached_property
    def theta_bar(self) -> Vec:
        allr = self.folded_finite["l"] | self.folded_finite["s"]
        return max(allr, key=self._height)

    @cached_property
    def theta_bar_s(self) -> Vec | None:
        s = self.folded_finite["s"]
        return max(s, key=self._height) if s else None

    @cached_property
    def theta(self) -> Vec:
        return max(self.up.finite_positive, key=sum)

    # -- Sigma labels ------------------------------------------------------
    def label(self, alpha: Sequence[int]) -> str:
        """Sigma-set label of a positive finite root (exactly one, else AffineError)."""
        w = self.O(alpha).vector
        k = self.up.level(w)
        y = _add(w, self.up.delta, -k)
        L, S = self.folded_finite["l"], self.folded_finite["s"]
        neg = lambda A: {_scale(a, -1) for a in A}  # noqa: E731
        two = lambda A: {_scale(a, 2) for a in A}  # noqa: E731
        tests = {
            "s": k == 0 and y in S,
            "l": k == 0 and y in L,
            "l'": k == 1 and (y in L or y in neg(L)),
            "l''": k == 2 and (y in L or y in neg(L)),
            "l'''": k == 3 and (y in L or y in neg(L)),
            "s'": k == 1 and (y in S or y in neg(S)),
            "2s'": k == 1 and (y in two(S) or y in neg(two(S))),
            "2s''": k == 3 and (y in two(S) or y in neg(two(S))),
            "0": k > 0 and not any(y),
        }
        hits = [x for x, ok in tests.items() if ok]
        if len(hits) != 1:
            raise AffineError(f"unclassified root {tuple(alpha)}: O = {w}, matches {hits}")
        return hits[0]

    @cached_property
    def labels(self) -> dict:
        return {a: self.label(a) for a in self.up.finite_positive}

    @cached_property
    def sigma0_plus(self) -> list[Vec]:
        return [a for a, x in self.labels.items() if x == "0"]

    def sigma_set(self, x: str) -> list[Vec]:
        return [a for a, lab in self.labels.items() if lab == x]

    def epsilon(self, alpha: Sequence[int]) -> str:
        fin = self.up.restrict(alpha)
        if self.case == "D":
            i, j = epsilon_A(fin)
            return f"e{i}-e{j}"
        i, s, j = epsilon_D(fin)
        return f"e{i}{'+' if s > 0 else '-'}e{j}"

    def membership(self, beta: Sequence[int]) -> set[Membership]:
        """All (label, m, primed) with beta in sigma^i{m delta +- alpha}, alpha in Sigma_label^+."""
        out = set()
        for i in range(self.sigma.order):
            g = self.sigma_inv_power(beta, i)
            m = self.up.level(g)
            x = self.up.finite_part(g)
            if _is_pos(x) and x in self.labels:
                lab = self.labels[x]
                if lab == "0" and i:
                    continue  # Sigma_0(m) is not sigma-saturated
                out.add(Membership(lab, m, False))
            elif _is_neg(x) and _scale(x, -1) in self.labels:
                lab = self.labels[_scale(x, -1)]
                if lab == "0" and i:
                    continue
                if m >= 1:
                    out.add(Membership(lab, m, True))
        return out

    def part(self, beta: Sequence[int]) -> str:
        """Which of Delta^(0)_>, Delta^(1)_>, Delta^(1)_<, Delta^(0)_< contains beta.

        Outside the Sigma_0 families the saturated families overlap, so the
        side is read off the folded image: positive finite part means '>'.
        Raises if no literal family agrees with that side.
        """
        beta = tuple(beta)
        x = self.up.finite_part(beta)
        if _is_pos(x) and self.labels.get(x) == "0":
            return "1>"
        if _is_neg(x) and self.labels.get(_scale(x, -1)) == "0":
            return "1<"
        v = self.folded_int(self.O(beta).vector)
        primed = _is_neg(self.down.finite_part(v))
        if not any(mb.primed == primed and mb.label != "0" for mb in self.membership(beta)):
            raise AffineError(f"root {beta} has no family on the side of its image {v}")
        return "0<" if primed else "0>"

    def folded_level(self, v: Sequence[int]) -> int:
        return self.down.level(v)


# ---------------------------------------------------------------------------
# expected values from the case analysis


def expected_sigma0(case: str, n: int) -> set[str]:
    if case == "A":
        s = {f"e1-e{2*n}", f"e1+e{2*n}"} | {f"e{i}+e{2*n+1-i}" for i in range(2, n + 1)}
    elif case == "B":
        s = {f"e{i}+e{2*n+2-i}" for i in range(2, n + 1)}
        s |= {f"e1-e{n+1}", f"e{n+1}-e{2*n+1}", f"e{n+1}+e{2*n+1}", f"e1-e{2*n+1}", f"e1+e{2*n+1}", f"e1+e{n+1}"}
    elif case == "C":
        s = {f"e{i}+e{2*n+2-i}" for i in range(1, n + 1)}
    else:
        s = {f"e{n+1}-e{2*n+2}"}
    return s


def expected_sigma0_size(case: str, n: int) -> int:
    return {"A": n + 1, "B": n + 5, "C": n, "D": 1}[case]


def expected_O_table(F: AffineFolding) -> tuple[Vec, Vec]:
    """(O(alpha_0), O(theta)) from the four-case table, in upstairs coordinates."""
    d = F.up.delta
    th, ths = F.theta_bar, F.theta_bar_s
    if F.case == "A":
        return _add(d, ths, -2), _add(_scale(d, 3), ths, 2)
    if F.case == "B":
        return _add(d, th, -1), _add(_scale(d, 3), th)
    if F.case == "C":
        return _add(d, ths, -1), _add(d, ths)
    return _add(_scale(d, 2), th, -1), _add(_scale(d, 2), th)


def sigma0_plus(case: str, n: int) -> list[Vec]:
    return AffineFolding(case, n).sigma0_plus


def classify_sigma_sets(beta: Sequence[int], case: str, n: int) -> str:
    return AffineFolding(case, n).label(beta)


def orbit_map_O(beta: Sequence[int], case: str, n: int) -> OrbitImage:
    return AffineFolding(case, n).O(beta)


def enumerate_real_positive(system: AffineSystem, M: int) -> list[Vec]:
    return system.enumerate_real_positive(M)


def verify_sigma0(case: str, n: int) -> Report:
    F = AffineFolding(case, n)
    rep = Report(f"sigma0-{case}{n}")
    got = {F.epsilon(a) for a in F.sigma0_plus}
    exp = expected_sigma0(case, n)
    rep.add(f"Sigma_0^+ for case ({case}), n={n}", got == exp, f"got {sorted(got)}, expected {sorted(exp)}")
    rep.add(f"|Sigma_0^+| = {expected_sigma0_size(case, n)}", len(got) == expected_sigma0_size(case, n), str(len(got)))
    # pairwise orthogonality of type kA_1 (cases A, C, D); A_3 + (n-1)A_1 for case B
    comps = _components(F.X, F.sigma0_plus)
    sizes = sorted(len(c) for c in comps)
    exp_sizes = sorted([1] * (n - 1) + [6]) if case == "B" else [1] * expected_sigma0_size(case, n)
    rep.add("Sigma_0^+ subsystem type", sizes == exp_sizes, f"component sizes {sizes}")
    if case == "B":
        z4 = {}
        for a in F.sigma0_plus:
            if len(F.orbit(a)) == 4:
                k = F.up.level(F.O(a).vector)
                z4.setdefault(k, set()).add(F.epsilon(a))
        exp4 = {3: {f"e1+e{n+1}"}, 2: {f"e1-e{2*n+1}", f"e1+e{2*n+1}"},
                1: {f"e1-e{n+1}", f"e{n+1}-e{2*n+1}", f"e{n+1}+e{2*n+1}"}}
        rep.add("Z_4 cap Sigma_0^+(k), k = 1,2,3", z4 == exp4, str({k: sorted(v) for k, v in sorted(z4.items())}))
    return rep


def _components(X: CartanDatum, roots: Sequence[Vec]) -> list[list[Vec]]:
    roots = list(roots)
    seen: set = set()
    comps = []
    for r in roots:
        if r in seen:
            continue
        stack, comp = [r], []
        seen.add(r)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in roots:
                if b not in seen and X.form(a, b) != 0:
                    seen.add(b)
                    stack.append(b)
        comps.append(comp)
    return comps


def O_consistency_check(case: str, n: int) -> Report:
    F = AffineFolding(case, n)
    rep = Report(f"O-table-{case}{n}")
    e0, eth = expected_O_table(F)
    a0 = F.X.simple_root(0)
    got0, gth = F.O(a0).vector, F.O(F.theta).vector
    rep.add(f"O(alpha_0) in case ({case})", got0 == e0, f"{F.O(a0).render()}")
    rep.add(f"O(theta) in case ({case})", gth == eth, f"{F.O(F.theta).render()}")
    if case == "D":
        rep.add("O(theta) = 2(theta + sigma(theta)) in case (D)", F.O(F.theta).doubled
                and gth == _scale(_add(F.theta, F.sigma.apply_root(F.theta)), 2))
    # the folded finite system has the expected simple system {O(alpha_i)}
    simple = {F.alpha_tilde[eta] for eta in range(len(F.sigma.orbits)) if eta != F.eta0}
    allr = F.folded_finite["l"] | F.folded_finite["s"]
    nfold = len(F.down.finite_positive)
    rep.add("O(Delta_0') is the positive system of the folded finite type",
            len(allr) == nfold and simple <= allr and {F.folded_int(w) for w in allr} == set(F.down.finite_positive),
            f"{len(allr)} roots vs {nfold}")
    return rep


def verify_sigma_partition(case: str, n: int) -> Report:
    F = AffineFolding(case, n)
    rep = Report(f"sigma-partition-{case}{n}")
    try:
        labels = F.labels
    except AffineError as e:
        rep.add("every positive finite root has exactly one label", False, str(e))
        return rep
    rep.add("every positive finite root has exactly one label", True, f"{len(labels)} roots")
    used = set(labels.values())
    rep.add(f"labels occurring in case ({case}) are {F.allowed}", used <= set(F.allowed),
            f"used {sorted(used)}")
    counts = {x: len(F.sigma_set(x)) for x in F.allowed}
    rep.data["counts"] = counts
    if case == "A":
        tot = counts["2s'"] + counts["2s''"]
        rep.add("|Sigma_2s' + Sigma_2s''| = 8n - 8", tot == 8 * n - 8, str(tot))
        exp = {f"e1+e{j}" for j in range(2, 2 * n + 1)} | {f"e1-e{j}" for j in range(2, 2 * n + 1)}
        exp |= {f"e{i}+e{2*n}" for i in range(2, 2 * n)} | {f"e{i}-e{2*n}" for i in range(2, 2 * n)}
        got = {F.epsilon(a) for a, x in labels.items() if x not in ("s", "l", "l'")}
        rep.add("Delta_0^+ - Y - Sigma_l' = {e1 +- ej} + {ei +- e2n} off Sigma_0", got - set(
            F.epsilon(a) for a in F.sigma0_plus) == exp - {f"e1-e{2*n}", f"e1+e{2*n}"}, str(sorted(got ^ exp)))
        both = exp & {F.epsilon(a) for a in F.sigma0_plus}
        rep.add("{e1 +- ej} + {ei +- e2n} meets Sigma_0^+ in {e1 +- e2n}", both == {f"e1-e{2*n}", f"e1+e{2*n}"},
                str(sorted(both)))
        got2 = {F.epsilon(a) for a, x in labels.items() if x in ("2s'", "2s''")}
        rep.add("Sigma_2s' + Sigma_2s'' = Delta_0^+ - Y - Sigma_l' - Sigma_0^+",
                got2 == got - {F.epsilon(a) for a in F.sigma0_plus}, str(sorted(got2)))
    elif case == "B":
        tot = counts["l'"] + counts["l''"] + counts["l'''"]
        rep.add("|Sigma_l' + Sigma_l'' + Sigma_l'''| = 10(n - 1)", tot == 10 * (n - 1), str(tot))
        z2 = {F.epsilon(a) for a, x in labels.items() if x == "l''" and len(F.orbit(a)) == 2}
        exp = {f"e{min(i, n+1)}+e{max(i, n+1)}" for i in range(2, 2 * n + 1) if i != n + 1}
        rep.add("{alpha in Z_2 : O(alpha) in 2 delta + long} = {e_i + e_(n+1)}", z2 == exp, str(sorted(z2)))
    elif case == "C":
        tot = counts["s'"] + counts["l''"]
        rep.add("|Sigma_s' + Sigma_l''| = 2n^2", tot == 2 * n * n, str(tot))
        got = {F.epsilon(a) for a, x in labels.items() if x == "l''"}
        exp = {f"e{min(i, n+1)}+e{max(i, n+1)}" for i in range(1, 2 * n + 2) if i != n + 1}
        rep.add("{alpha : O(alpha) in 2 delta + long} = {e_i + e_(n+1)}", got == exp, str(sorted(got)))
    else:
        rep.add("|Sigma_l''| = 2n", counts["l''"] == 2 * n, str(counts["l''"]))
        got = {F.epsilon(a) for a, x in labels.items() if x in ("l''", "0")}
        exp = {f"e{i}-e{2*n+2}" for i in range(1, 2 * n + 2)}
        rep.add("Delta_0^+ - Y = {e_i - e_(2n+2)}", got == exp, str(sorted(got ^ exp)))
    return rep


# class-to-root tables: (source label, target class, residue, modulus), target level is the folded level
BIJECTION_TABLE = {
    "A": [("s", "s", 0, 1), ("l", "l", 0, 2), ("l'", "l", 1, 2), ("2s'", "2s", 1, 4), ("2s''", "2s", 3, 4)],
    "B": [("s", "s", 0, 2), ("s'", "s", 1, 2), ("l", "l", 0, 4), ("l'", "l", 1, 4), ("l''", "l", 2, 4),
          ("l'''", "l", 3, 4)],
    "C": [("s", "s", 0, 2), ("s'", "s", 1, 2), ("l", "l", 0, 4), ("l''", "l", 2, 4)],
    "D": [("s", "s", 0, 1), ("l", "l", 0, 1), ("l''", "l", 0, 1)],
}


def folded_class(F: AffineFolding, v: Vec) -> tuple[str, int, bool]:
    """(length class, folded level, primed) of a folded positive real root."""
    D = F.down
    m = D.level(v)
    x = D.finite_part(v)
    primed = _is_neg(x)
    return D.length_class(v), m, primed


def _row_matches(row: tuple, primed: bool, cls: str, level: int) -> bool:
    _, tgt, res, mod = row
    r = (-res) % mod if primed else res
    return cls == tgt and level % mod == r


def _merge(case: str, label: str) -> str:
    # in case (D) the long target is shared by Sigma_l and Sigma_l''
    return "l+l''" if case == "D" and label in ("l", "l''") else label


def verify_orbit_bijection(case: str, n: int, M: int = 4) -> Report:
    """The O-classes of positive real roots vs the folded real roots, levels <= M.

    The families Sigma_x(m), Sigma'_x(m) are sigma-saturated and can overlap,
    so each class is assigned the family whose table row matches its image:
    same priming and the image level in the listed residue class.
    """
    F = AffineFolding(case, n)
    rep = Report(f"orbit-bijection-{case}{n}")
    window = F.up.enumerate_real_positive(M)
    classes: dict = {}
    memb: dict = {}
    zero_bad = []
    for b in window:
        ms = F.membership(b)
        if any(mb.label == "0" for mb in ms):
            if F.O(b).vector != _scale(F.up.delta, F.up.level(F.O(b).vector)):
                zero_bad.append(b)
            continue
        memb[b] = ms
        classes.setdefault(F.O(b).vector, []).append(b)
    rep.add("O maps m delta +- Sigma_0^+ to multiples of delta", not zero_bad, str(zero_bad[:3]))
    unlabelled = [b for b, ms in memb.items() if not ms]
    rep.add("every other window root lies in some Sigma_x(m) or Sigma'_x(m)", not unlabelled, str(unlabelled[:3]))
    images = {w: F.folded_int(w) for w in classes}
    bad = [v for v in images.values() if not F.down.is_real_root(v)]
    rep.add("O(beta) is a positive real folded root", not bad, str(bad[:3]))
    L = _covered_folded_level(F, M)
    target = set(F.down.enumerate_real_positive(L))
    got = {v for v in images.values() if F.folded_level(v) <= L}
    rep.add(f"f is onto the folded real positive roots of level <= {L}", target == got,
            f"missing {sorted(target - got)[:3]}, extra {sorted(got - target)[:3]}")
    rep.data["covered_level"] = L
    table = BIJECTION_TABLE[case]
    assigned: dict = {}
    unmatched, ambiguous = [], []
    for w, bs in classes.items():
        v = images[w]
        cls, m, fprimed = folded_class(F, v)
        labs = {(mb.label, mb.primed) for b in bs for mb in memb[b]}
        rows = {(_merge(case, row[0]), p) for row in table for (lab, p) in labs
                if lab == row[0] and p == fprimed and _row_matches(row, p, cls, m)}
        if not rows:
            unmatched.append((w, sorted(labs), cls, m))
        elif len(rows) > 1:
            ambiguous.append((w, sorted(rows)))
        else:
            assigned[w] = rows.pop()
    rep.add(f"case ({case}) table: every class has a family whose row matches its image", not unmatched,
            str(unmatched[:3]))
    rep.add(f"case ({case}) table: the matching family is unique", not ambiguous, str(ambiguous[:3]))
    for src, tgt, res, mod in table:
        for primed in (False, True):
            if case == "D" and tgt == "l":
                continue  # two families share the long target; checked as a union below
            r = (-res) % mod if primed else res
            want = {t for t in target if folded_class(F, t) == (tgt, F.folded_level(t), primed)
                    and F.folded_level(t) % mod == r}
            have = {images[w] for w, a in assigned.items() if a == (src, primed) and F.folded_level(images[w]) <= L}
            head = "S'" if primed else "S"
            rep.add(f"f({head}_{src}) = folded {tgt} roots of level {r} mod {mod}", have == want,
                    f"{len(have)} vs {len(want)}")
    if case == "D":
        for primed in (False, True):
            head = "S'" if primed else "S"
            want = {t for t in target if folded_class(F, t)[0] == "l" and folded_class(F, t)[2] == primed}
            have = {images[w] for w, a in assigned.items() if a == ("l+l''", primed)
                    and F.folded_level(images[w]) <= L}
            rep.add(f"f({head}_l + {head}_l'') = folded long roots", have == want, f"{len(have)} vs {len(want)}")
    sizes: dict = {}
    for w, a in assigned.items():
        key = ("S'_" if a[1] else "S_") + a[0]
        sizes.setdefault(key, set()).add(len(classes[w]))
    rep.data["class_sizes"] = {k: sorted(s) for k, s in sorted(sizes.items())}
    return rep


def _covered_folded_level(F: AffineFolding, M: int) -> int:
    """Largest folded level L whose preimages all have upstairs level <= M."""
    L = 0
    while True:
        nxt = L + 1
        ok = True
        for v in F.down.enumerate_real_positive(nxt):
            if F.folded_level(v) != nxt:
                continue
            # any preimage beta has O(beta) = v; upstairs level of O(beta) is level * |orbit| (* 2 if doubled)
            # so a level-nxt folded root needs upstairs level at most the folded-to-upstairs level ratio
            up_level = _upstairs_level_bound(F, v)
            if up_level > M:
                ok = False
                break
        if not ok:
            return L
        L = nxt
        if L > 4 * M + 4:
            return L


def _upstairs_level_bound(F: AffineFolding, v: Vec) -> int:
    """Upper bound for the upstairs level of a preimage of the folded root v."""
    # O(beta) has upstairs delta-coefficient >= level(beta) (orbit sums only add), so the
    # level of beta is at most the delta-coefficient of the upstairs vector of v.
    w = [0] * F.X.rank
    for eta, c in enumerate(v):
        for j, x in enumerate(F.alpha_tilde[eta]):
            w[j] += c * x
    return F.up.level(w)


# ---------------------------------------------------------------------------
# infinite words and convex orders


@dataclass
class ConvexReport(Report):
    order: list = field(default_factory=list)


class SubsystemWord:
    """Infinite word of an affine subsystem given by upstairs simple-root vectors.

    ``components`` is a list of (vectors, zero index) for irreducible affine
    components; the abstract datum is their block sum.
    """

    def __init__(self, X: CartanDatum, components: Sequence[tuple[Sequence[Vec], int]], comp_order: Sequence[int] | None = None):
        self.X = X
        self.components = [(list(v), z) for v, z in components]
        order = list(comp_order) if comp_order is not None else list(range(len(self.components)))
        vecs = []
        offsets = []
        for vs, _ in self.components:
            offsets.append(len(vecs))
            vecs.extend(vs)
        self.vectors = vecs
        P = [[X.form(a, b) for b in vecs] for a in vecs]
        self.datum = CartanDatum.from_matrix([str(k) for k in range(len(vecs))], P, "Delta1")
        period = []
        for c in order:
            vs, z = self.components[c]
            sub = CartanDatum.from_matrix([str(k) for k in range(len(vs))],
                                          [[X.form(a, b) for b in vs] for a in vs], f"comp{c}")
            w = AffineSystem(sub, z).translation_word
            period.extend(offsets[c] + i for i in w)
        self.period = tuple(period)
        self.word = InfiniteWord(self, self.period)

    def to_upstairs(self, v: Sequence[int]) -> Vec:
        out = [0] * self.X.rank
        for c, vec in zip(v, self.vectors):
            for j, x in enumerate(vec):
                out[j] += c * x
        return tuple(out)


def folded_word(F: AffineFolding) -> tuple[int, ...]:
    return F.down.translation_word


def build_infinite_word(F: AffineFolding, K: int, ul_period: Sequence[int] | None = None) -> dict:
    """Lift a periodic folded word and compute beta_k on both sides.

    Returns lifted period, left/right upstairs betas, folded betas and checks.
    """
    ul = tuple(ul_period) if ul_period is not None else folded_word(F)
    if not F.down.reduced_word_of(_word_matrix(F.down, ul)):
        raise AffineError("folded period is not reduced")
    lifted = F.sigma.lift_sequence(ul, check=False)
    blocks = []
    for eta in ul:
        blocks.append(len(F.sigma.block(eta)))
    up_word = InfiniteWord(F.up, lifted)
    down_word = InfiniteWord(F.down, ul)
    nper = -(-K // len(lifted))
    left = up_word.left(nper * len(lifted))
    right = up_word.right(nper * len(lifted))
    dl = down_word.left(nper * len(ul))
    dr = down_word.right(nper * len(ul))
    return {"folded_period": ul, "period": lifted, "blocks": blocks, "left": left, "right": right,
            "folded_left": dl, "folded_right": dr, "periods": nper}


def _word_matrix(S: AffineSystem, word: Sequence[int]) -> list[Vec]:
    return [S.apply_word(word, S.datum.simple_root(j)) for j in range(S.rank)]


def _block_images(F: AffineFolding, betas: Sequence[Vec], fbetas: Sequence[Vec], blocks: Sequence[int],
                  left: bool) -> list:
    """Check that each lifted block maps under O to the corresponding folded beta."""
    bad = []
    L = len(blocks)
    # left side reads the period backwards
    seq = list(reversed(blocks)) if left else list(blocks)
    pos = 0
    for k, fb in enumerate(fbetas):
        size = seq[k % L]
        chunk = betas[pos:pos + size]
        pos += size
        if len(chunk) < size:
            break
        imgs = {F.folded_int(F.O(b).vector) for b in chunk}
        if imgs != {fb}:
            bad.append((k, chunk, fb, imgs))
    return bad


def verify_convex(case: str, n: int, window: int = 200, seed: int = 0, orderings: int = 3) -> ConvexReport:
    """Convexity on a window: the order Delta0_> < Delta1_> < delta < Delta1_< < Delta0_< is convex."""
    F = AffineFolding(case, n)
    rep = ConvexReport(f"convex-{case}{n}")
    if F.excluded:
        raise AffineError(f"case ({case}) with n={n} is excluded from the isomorphism theorem")
    half = max(window // 2, 1)
    W = build_infinite_word(F, half)
    left, right = W["left"], W["right"]
    allpos = lambda bs: all(_is_pos(b) for b in bs)  # noqa: E731
    rep.add("lifted word is reduced (left betas positive and distinct)", allpos(left) and len(set(left)) == len(left))
    rep.add("lifted word is reduced (right betas positive and distinct)", allpos(right) and len(set(right)) == len(right))
    rep.add("folded word is reduced", allpos(W["folded_left"]) and len(set(W["folded_left"])) == len(W["folded_left"]))
    bl = _block_images(F, left, W["folded_left"], W["blocks"], True)
    br = _block_images(F, right, W["folded_right"], W["blocks"], False)
    rep.add("each lifted block is one O-class over the folded beta", not bl and not br, str((bl + br)[:2]))
    # {beta_k} exhausts Delta^(0)_> (resp. <) among roots whose folded image has level <= Lf
    Lf = min(_folded_coverage(F, W["folded_left"], False), _folded_coverage(F, W["folded_right"], True))
    parts_left = {F.part(b) for b in left}
    parts_right = {F.part(b) for b in right}
    rep.add("{beta_k : k <= 0} lies in Delta^(0)_>", parts_left == {"0>"}, str(parts_left))
    rep.add("{beta_k : k > 0} lies in Delta^(0)_<", parts_right == {"0<"}, str(parts_right))
    allroots = F.up.enumerate_real_positive(Lf)
    low = [b for b in allroots if F.part(b)[0] == "1" or F.folded_level(F.folded_int(F.O(b).vector)) <= Lf]
    want_left = {b for b in low if F.part(b) == "0>"}
    want_right = {b for b in low if F.part(b) == "0<"}
    rep.add(f"Delta^(0)_> with folded level <= {Lf} is contained in the window", want_left <= set(left),
            str(sorted(want_left - set(left))[:3]))
    rep.add(f"Delta^(0)_< with folded level <= {Lf} is contained in the window", want_right <= set(right),
            str(sorted(want_right - set(right))[:3]))
    Lcov = max(Lf, 1)
    # Delta^(1) parts, levels up to Lcov
    S0 = F.sigma0_plus
    d = F.up.delta
    M1 = max(Lcov, 1)
    stable = {b for b in allroots if F.part(b) in ("1>", "1<")}
    rep.add("Delta^(1)_> + Delta^(1)_< is sigma-stable", {F.sigma.apply_root(b) for b in stable
                                                         if F.up.level(F.sigma.apply_root(b)) <= Lcov} <= stable)
    rng = random.Random(seed)
    for t in range(orderings):
        if case == "B":
            d1_gt, d1_lt, desc = _delta1_case_b(F, M1, rng)
        else:
            gam = list(S0)
            rng.shuffle(gam)
            d1_gt = [_add(g, d, m) for m in range(0, M1 + 1) for g in gam]
            d1_lt = [_add(_scale(g, -1), d, m) for m in range(M1, 0, -1) for g in reversed(gam)]
            desc = [F.epsilon(g) for g in gam]
        order = list(left) + d1_gt + [d] + d1_lt + list(reversed(right))
        viol = convexity_violations(order)
        rep.add(f"ordering {t + 1} ({', '.join(desc)}): no convexity violations on {len(order)} roots",
                not viol, str(viol[:3]))
        if t == 0:
            rep.order = order
        if case == "B":
            ok = set(d1_gt) == {_add(g, d, m) for g in S0 for m in range(M1 + 1)}
            rep.add(f"ordering {t + 1}: Delta^(1) word covers Delta^(1)_> up to level {M1}", ok)
    rep.data["window_size"] = len(rep.order)
    rep.data["covered_level"] = Lcov
    return rep


def _folded_coverage(F: AffineFolding, fbetas: Sequence[Vec], primed: bool) -> int:
    """Largest folded level L with every folded root of that side and level <= L among fbetas."""
    have = set(fbetas)
    top = max(F.folded_level(v) for v in fbetas)
    for v in F.down.enumerate_real_positive(top + 1):
        if _is_neg(F.down.finite_part(v)) == primed and v not in have:
            return F.folded_level(v) - 1
    return top


def _delta1_case_b(F: AffineFolding, M1: int, rng: random.Random):
    """Delta^(1)_> and Delta^(1)_< ordered by the infinite word of the affine subsystem."""
    X = F.X
    d = F.up.delta
    comps = _components(X, F.sigma0_plus)
    big = [c for c in comps if len(c) == 6]
    if len(big) != 1:
        raise AffineError("case (B): Sigma_0^+ does not contain a unique A_3 component")
    X1 = big[0]
    simple1 = [g for g in X1 if not any(_add(a, b) == g for a in X1 for b in X1)]
    theta1 = max(X1, key=sum)
    components = [([_add(d, theta1, -1)] + simple1, 0)]
    for c in comps:
        if len(c) == 1:
            g = c[0]
            components.append(([_add(d, g, -1), g], 0))
    order = list(range(len(components)))
    rng.shuffle(order)
    sw = SubsystemWord(X, components, order)
    per = len(sw.period)
    nper = M1 + 2
    gt = [sw.to_upstairs(b) for b in sw.word.left(per * nper)]
    lt = [sw.to_upstairs(b) for b in sw.word.right(per * nper)]
    gt = [b for b in gt if F.up.level(b) <= M1]
    lt = [b for b in lt if F.up.level(b) <= M1]
    desc = [f"component {c}" for c in order]
    return gt, list(reversed(lt)), desc


def convexity_violations(order: Sequence[Vec]) -> list:
    """Triples (a, b, a + b) in the order where a + b is not between a and b."""
    pos = {v: k for k, v in enumerate(order)}
    if len(pos) != len(order):
        raise ConvexityError("order has repeated entries")
    out = []
    for i, a in enumerate(order):
        for j in range(i + 1, len(order)):
            b = order[j]
            s = _add(a, b)
            k = pos.get(s)
            if k is not None and not i < k < j:
                out.append((a, b, s))
    return out


def classify_rows(case: str, n: int, levels: int) -> list[dict]:
    """Rows for the classify command: root, level, orbit size, O-image, Sigma family."""
    F = AffineFolding(case, n)
    rows = []
    for b in F.up.enumerate_real_positive(levels):
        ms = F.membership(b)
        img = F.O(b)
        rows.append({
            "root": "(" + ",".join(map(str, b)) + ")",
            "level": F.up.level(b),
            "orbit": len(F.orbit(b)),
            "O": img.render(),
            "sigma": ";".join(sorted(mb.render() for mb in ms)),
        })
    return rows
