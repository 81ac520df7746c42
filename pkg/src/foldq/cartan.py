"""Cartan data, diagram automorphisms, folding, finite Weyl groups.

Indices are positions ``0..n-1``; ``labels`` only matter for display and
parsing.  Roots are integer tuples in simple-root coordinates.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

Root = tuple[int, ...]


class CartanError(ValueError):
    pass


@dataclass(frozen=True)
class CartanDatum:
    labels: tuple[str, ...]
    pairing: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise CartanError("duplicate labels")
        if len(self.pairing) != n or any(len(r) != n for r in self.pairing):
            raise CartanError("pairing must be a square matrix matching labels")
        for i in range(n):
            a = self.pairing[i][i]
            if a <= 0 or a % 2:
                raise CartanError(f"(a_i,a_i) must be a positive even integer at {self.labels[i]}")
            for j in range(n):
                if self.pairing[i][j] != self.pairing[j][i]:
                    raise CartanError("pairing is not symmetric")
                if i != j:
                    num = 2 * self.pairing[i][j]
                    if num > 0 or num % self.pairing[j][j]:
                        raise CartanError("2(a_i,a_j)/(a_j,a_j) must be a non-positive integer")

    @classmethod
    def from_matrix(cls, labels: Iterable, pairing: Sequence[Sequence[int]], name: str = "") -> "CartanDatum":
        return cls(tuple(str(x) for x in labels), tuple(tuple(int(v) for v in r) for r in pairing), name)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise CartanError(f"unknown index {label!r}") from None

    def d(self, i: int) -> int:
        return self.pairing[i][i] // 2

    def form(self, x: Sequence[int], y: Sequence[int]) -> int:
        P = self.pairing
        return sum(x[i] * P[i][j] * y[j] for i in range(self.rank) if x[i] for j in range(self.rank) if y[j])

    def cartan_entry(self, i: int, j: int) -> int:
        """a_ij = 2(a_i,a_j)/(a_j,a_j)."""
        return 2 * self.pairing[i][j] // self.pairing[j][j]

    @cached_property
    def cartan_matrix(self) -> tuple[tuple[int, ...], ...]:
        n = self.rank
        return tuple(tuple(self.cartan_entry(i, j) for j in range(n)) for i in range(n))

    def serre_degree(self, i: int, j: int) -> int:
        """Number of f_i factors in the Serre relation between f_i and f_j.

        This is 1 - 2(a_i,a_j)/(a_i,a_i); for the folded C2 datum it gives 2
        for the long index and 3 for the short one.
        """
        return 1 - 2 * self.pairing[i][j] // self.pairing[i][i]

    @cached_property
    def simply_laced(self) -> bool:
        P = self.pairing
        return all(
            (P[i][j] == 2) if i == j else P[i][j] in (0, -1)
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def simple_root(self, i: int) -> Root:
        return tuple(1 if k == i else 0 for k in range(self.rank))

    def reflect(self, i: int, beta: Sequence[int]) -> Root:
        P = self.pairing
        c = 2 * sum(P[i][k] * beta[k] for k in range(self.rank)) // P[i][i]
        if not c:
            return tuple(beta)
        out = list(beta)
        out[i] -= c
        return tuple(out)

    @cached_property
    def _leading_minors(self) -> list[Fraction]:
        n = self.rank
        out = []
        for k in range(1, n + 1):
            out.append(_det([[Fraction(self.pairing[i][j]) for j in range(k)] for i in range(k)]))
        return out

    @cached_property
    def is_finite(self) -> bool:
        return all(m > 0 for m in self._leading_minors)

    @cached_property
    def is_affine(self) -> bool:
        """Positive semidefinite with one-dimensional radical (irreducible case)."""
        if self.is_finite:
            return False
        n = self.rank
        M = [[Fraction(v) for v in r] for r in self.pairing]
        if _det(M) != 0:
            return False
        # every proper principal submatrix positive definite
        for drop in range(n):
            keep = [k for k in range(n) if k != drop]
            sub = CartanDatum(tuple(self.labels[k] for k in keep),
                              tuple(tuple(self.pairing[a][b] for b in keep) for a in keep))
            if not sub.is_finite:
                return False
        return True

    @cached_property
    def null_root(self) -> Root:
        """Primitive positive generator of the radical (affine type only)."""
        if not self.is_affine:
            raise CartanError("null root only defined for affine data")
        M = [[Fraction(v) for v in r] for r in self.pairing]
        vec = _kernel_vector(M)
        den = 1
        for v in vec:
            den = den * v.denominator // _gcd(den, v.denominator)
        ints = [int(v * den) for v in vec]
        g = 0
        for v in ints:
            g = _gcd(g, abs(v))
        ints = [v // g for v in ints]
        if ints[0] < 0 or any(v < 0 for v in ints):
            ints = [-v for v in ints]
        if any(v <= 0 for v in ints):
            raise CartanError("radical vector is not positive")
        return tuple(ints)

    # -- finite Weyl group --------------------------------------------
    @cached_property
    def positive_roots(self) -> tuple[Root, ...]:
        if not self.is_finite:
            raise CartanError("positive_roots needs a finite-type datum")
        seen = {self.simple_root(i) for i in range(self.rank)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for b in frontier:
                for i in range(self.rank):
                    r = self.reflect(i, b)
                    if all(v >= 0 for v in r) and r not in seen:
                        seen.add(r)
                        nxt.append(r)
            frontier = nxt
        return tuple(sorted(seen, key=lambda r: (sum(r), r)))

    def act(self, word: Sequence[int], beta: Sequence[int]) -> Root:
        """s_{w_1} ... s_{w_k}(beta)."""
        out = tuple(beta)
        for i in reversed(word):
            out = self.reflect(i, out)
        return out

    def longest_word(self) -> tuple[int, ...]:
        """Lexicographically smallest reduced word for w_0 (greedy)."""
        if not self.is_finite:
            raise CartanError("longest_word needs a finite-type datum")
        word: list[int] = []
        while True:
            for i in range(self.rank):
                img = self.act(word, self.simple_root(i))
                if all(v >= 0 for v in img):
                    word.append(i)
                    break
            else:
                return tuple(word)

    def beta_sequence(self, word: Sequence[int]) -> list[Root]:
        """beta_k = s_{i_1}...s_{i_{k-1}}(a_{i_k}); rejects non-reduced words."""
        out = []
        seen = set()
        for k, i in enumerate(word):
            b = self.act(word[:k], self.simple_root(i))
            if any(v < 0 for v in b) or b in seen:
                raise CartanError(f"word {tuple(word)} is not reduced (position {k})")
            seen.add(b)
            out.append(b)
        return out

    def is_reduced(self, word: Sequence[int]) -> bool:
        try:
            self.beta_sequence(word)
        except CartanError:
            return False
        return True

    def kostant_count(self, nu: Sequence[int], roots: Sequence[Root] | None = None) -> int:
        """Number of multisets of positive roots summing to nu (brute force)."""
        roots = list(self.positive_roots if roots is None else roots)
        return _count_partitions(tuple(nu), tuple(roots))

    def to_json(self, sigma: "DiagramAutomorphism | None" = None) -> dict:
        d = {"labels": list(self.labels), "pairing": [list(r) for r in self.pairing]}
        if sigma is not None:
            d["sigma"] = [self.labels[sigma.perm[i]] for i in range(self.rank)]
        return d


@lru_cache(maxsize=None)
def _count_partitions(nu: tuple[int, ...], roots: tuple[Root, ...]) -> int:
    if all(v == 0 for v in nu):
        return 1
    if not roots:
        return 0
    head, rest = roots[0], roots[1:]
    total = 0
    cur = nu
    while all(v >= 0 for v in cur):
        total += _count_partitions(cur, rest)
        cur = tuple(a - b for a, b in zip(cur, head))
    return total


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [row[:] for row in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                for k in range(c, n):
                    M[r][k] -= f * M[c][k]
    return det


def _kernel_vector(M: list[list[Fraction]]) -> list[Fraction]:
    n = len(M)
    A = [row[:] for row in M]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, n) if A[k][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pv = A[r][c]
        A[r] = [v / pv for v in A[r]]
        for k in range(n):
            if k != r and A[k][c]:
                f = A[k][c]
                A[k] = [a - f * b for a, b in zip(A[k], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise CartanError("radical is not one-dimensional")
    fc = free[0]
    vec = [Fraction(0)] * n
    vec[fc] = Fraction(1)
    for row, c in enumerate(pivots):
        vec[c] = -A[row][fc]
    return vec


@dataclass(frozen=True)
class DiagramAutomorphism:
    datum: CartanDatum
    perm: tuple[int, ...]

    def __post_init__(self):
        n = self.datum.rank
        if sorted(self.perm) != list(range(n)):
            raise CartanError("sigma is not a permutation of the index set")
        P = self.datum.pairing
        for i in range(n):
            for j in range(n):
                if P[self.perm[i]][self.perm[j]] != P[i][j]:
                    raise CartanError("sigma does not preserve the pairing")

    @classmethod
    def from_labels(cls, datum: CartanDatum, mapping: dict) -> "DiagramAutomorphism":
        perm = list(range(datum.rank))
        for a, b in mapping.items():
            perm[datum.index(a)] = datum.index(b)
        return cls(datum, tuple(perm))

    @classmethod
    def identity(cls, datum: CartanDatum) -> "DiagramAutomorphism":
        return cls(datum, tuple(range(datum.rank)))

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def apply_root(self, beta: Sequence[int]) -> Root:
        out = [0] * len(beta)
        for i, v in enumerate(beta):
            out[self.perm[i]] += v
        return tuple(out)

    @cached_property
    def order(self) -> int:
        k, cur = 1, self.perm
        while cur != tuple(range(len(cur))):
            cur = tuple(self.perm[c] for c in cur)
            k += 1
        return k

    @cached_property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        seen = set()
        out = []
        for i in range(self.datum.rank):
            if i in seen:
                continue
            orb = {i}
            j = self.perm[i]
            while j != i:
                orb.add(j)
                j = self.perm[j]
            seen |= orb
            out.append(tuple(sorted(orb)))
        return tuple(out)

    @cached_property
    def orbit_index(self) -> tuple[int, ...]:
        out = [0] * self.datum.rank
        for k, orb in enumerate(self.orbits):
            for i in orb:
                out[i] = k
        return tuple(out)

    @cached_property
    def delta(self) -> tuple[int, ...]:
        P = self.datum.pairing
        res = []
        for orb in self.orbits:
            joined = any(P[i][j] != 0 for i in orb for j in orb if i != j)
            res.append(2 if joined else 1)
        return tuple(res)

    @property
    def admissible(self) -> bool:
        return all(d == 1 for d in self.delta)

    def fold(self) -> CartanDatum:
        """Folded datum on sigma-orbits (form (a_eta, a_eta')_1)."""
        P = self.datum.pairing
        orbs, dl = self.orbits, self.delta
        m = len(orbs)
        M = [[0] * m for _ in range(m)]
        for a in range(m):
            for b in range(m):
                if a == b:
                    M[a][b] = 2 * dl[a] * len(orbs[a])
                else:
                    cnt = sum(1 for i in orbs[a] for j in orbs[b] if P[i][j] != 0)
                    M[a][b] = -dl[a] * dl[b] * cnt
        labels = tuple(self.datum.labels[o[0]] for o in orbs)
        return CartanDatum(labels, tuple(tuple(r) for r in M), name=f"fold({self.datum.name})")

    def block(self, eta: int) -> tuple[int, ...]:
        """Lifted word for one folded index: orbit in index order, or (i,j,i)."""
        orb = self.orbits[eta]
        if self.delta[eta] == 1:
            return orb
        if len(orb) != 2:
            raise CartanError("joined orbits of size other than 2 have no (i,j,i) block")
        i, j = orb
        return (i, j, i)

    def lift_sequence(self, ul_h: Sequence[int], check: bool = True) -> tuple[int, ...]:
        word: list[int] = []
        for eta in ul_h:
            word.extend(self.block(eta))
        if check and self.datum.is_finite:
            self.datum.beta_sequence(word)
        return tuple(word)

    def block_positions(self, ul_h: Sequence[int]) -> list[tuple[int, tuple[int, ...]]]:
        """(eta, positions) for each block of the lifted word."""
        out = []
        pos = 0
        for eta in ul_h:
            L = len(self.block(eta))
            out.append((eta, tuple(range(pos, pos + L))))
            pos += L
        return out

    def fold_vector(self, nu: Sequence[int]) -> Root | None:
        """Folded coordinates of a sigma-fixed weight, or None.

        The orbit-sum lattice is spanned by O(a_i): sum over the orbit, doubled
        for joined orbits.
        """
        out = []
        for eta, orb in enumerate(self.orbits):
            vals = {nu[i] for i in orb}
            if len(vals) != 1:
                return None
            v = vals.pop()
            if v % self.delta[eta]:
                return None
            out.append(v // self.delta[eta])
        return tuple(out)

    def unfold_vector(self, ul_nu: Sequence[int]) -> Root:
        out = [0] * self.datum.rank
        for eta, orb in enumerate(self.orbits):
            for i in orb:
                out[i] = ul_nu[eta] * self.delta[eta]
        return tuple(out)


# -- standard types ---------------------------------------------------

def _chain(lengths: Sequence[int], bonds: Sequence[int] | None = None) -> list[list[int]]:
    n = len(lengths)
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = lengths[i]
    for i in range(n - 1):
        v = -(max(lengths[i], lengths[i + 1]) // 2) if bonds is None else bonds[i]
        M[i][i + 1] = M[i + 1][i] = v
    return M


def type_A(n: int, start: int = 1) -> CartanDatum:
    return CartanDatum.from_matrix(range(start, start + n), _chain([2] * n), f"A{n}")


def type_C(n: int) -> CartanDatum:
    if n == 1:
        return CartanDatum.from_matrix(["1"], [[2]], "C1")
    return CartanDatum.from_matrix(range(1, n + 1), _chain([2] * (n - 1) + [4]), f"C{n}")


def type_D(n: int) -> CartanDatum:
    """D_n with 1..n-2 a chain and n-1, n attached to n-2."""
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = 2
    for i in range(n - 2):
        M[i][i + 1] = M[i + 1][i] = -1
    M[n - 3][n - 1] = M[n - 1][n - 3] = -1
    return CartanDatum.from_matrix(range(1, n + 1), M, f"D{n}")


def affine_A(n: int) -> CartanDatum:
    """A_n^(1) on 0..n (cycle); n >= 2, or A_1^(1) for n = 1."""
    m = n + 1
    M = [[0] * m for _ in range(m)]
    for i in range(m):
        M[i][i] = 2
    if n == 1:
        M[0][1] = M[1][0] = -2
    else:
        for i in range(m):
            j = (i + 1) % m
            M[i][j] = M[j][i] = -1
    return CartanDatum.from_matrix(range(m), M, f"A{n}^(1)")


def affine_D(n: int) -> CartanDatum:
    """D_n^(1) on 0..n: 0,1 attached to 2; chain 2..n-2; n-1, n attached to n-2."""
    m = n + 1
    M = [[0] * m for _ in range(m)]
    for i in range(m):
        M[i][i] = 2

    def e(a, b):
        M[a][b] = M[b][a] = -1

    if n == 4:
        for k in (0, 1, 3, 4):
            e(2, k)
    else:
        e(0, 2)
        e(1, 2)
        for i in range(2, n - 2):
            e(i, i + 1)
        e(n - 2, n - 1)
        e(n - 2, n)
    return CartanDatum.from_matrix(range(m), M, f"D{n}^(1)")


def expected_type(name: str, n: int) -> list[list[int]]:
    """Symmetrized pairing of a standard (twisted) affine or finite type.

    Only used to check folding results up to relabeling, so any positive
    rescaling is fine.
    """
    if name == "C":
        return type_C(n).pairing  # type: ignore[return-value]
    if name == "A":
        return type_A(n).pairing  # type: ignore[return-value]
    if name == "A(1)":
        return affine_A(n).pairing  # type: ignore[return-value]
    if name == "C(1)":
        if n == 1:
            return [[2, -2], [-2, 2]]
        return _chain([4] + [2] * (n - 1) + [4])
    if name == "A2n(2)":
        # lengths 1:2:4 along a chain with double bonds at both ends
        if n == 1:
            return [[2, -4], [-4, 8]]
        return _chain([2] + [4] * (n - 1) + [8])
    if name == "A2n-1(2)":
        # nodes 0 and 1 both attached to 2, chain 2..n, node n long
        m = n + 1
        lengths = [2] * (m - 1) + [4]
        M = [[0] * m for _ in range(m)]
        for i in range(m):
            M[i][i] = lengths[i]
        for a, b in [(0, 2), (1, 2)] + [(i, i + 1) for i in range(2, m - 1)]:
            M[a][b] = M[b][a] = -(max(lengths[a], lengths[b]) // 2)
        return M
    raise CartanError(f"unknown expected type {name}")


def isomorphic(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> bool:
    """Cartan-matrix equality up to relabeling (small ranks only)."""
    n = len(A)
    if len(B) != n:
        return False

    def cm(P, perm):
        return [[Fraction(2 * P[perm[i]][perm[j]], P[perm[j]][perm[j]]) for j in range(n)] for i in range(n)]

    target = cm(B, list(range(n)))
    for perm in itertools.permutations(range(n)):
        if cm(A, perm) == target:
            return True
    return False


# -- presets ----------------------------------------------------------

@dataclass
class Preset:
    case: str
    X: CartanDatum
    sigma: DiagramAutomorphism
    expected: list[list[int]]
    expected_name: str
    p: int
    excluded: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def folded(self) -> CartanDatum:
        return self.sigma.fold()

    def fold_matches(self) -> bool:
        return isomorphic(self.folded.pairing, self.expected)


def _prime_of_order(e: int) -> int:
    for p in range(2, e + 1):
        k = e
        while k % p == 0:
            k //= p
        if k == 1:
            return p
    return 0


def _mk(case, X, mapping, expected, ename, excluded=False, **notes) -> Preset:
    sig = DiagramAutomorphism.from_labels(X, mapping) if isinstance(mapping, dict) else DiagramAutomorphism(X, tuple(mapping))
    return Preset(case, X, sig, expected, ename, _prime_of_order(sig.order), excluded, dict(notes))


PRESET_NAMES = (
    "A2", "F_n1", "A_n1", "A_n2", "A_n3", "A_n4", "A_n2'", "A_n3'", "A_n4'", "A_n5",
    "A_a1", "A_a1'", "A_a2",
)


def preset(case: str, n: int | None = None, m: int | None = None) -> Preset:
    """Built-in (X, sigma) pairs from the case tables, by case label."""
    c = case.replace("′", "'").replace("_prime", "'")
    if c == "A2":
        c, n = "F_n1", 1
    if c == "F_n1":
        n = 2 if n is None else n
        X = type_A(2 * n)
        mp = {i: 2 * n + 1 - i for i in range(1, 2 * n + 1)}
        return _mk("F_n1", X, mp, expected_type("C", n), f"C{n}", n=n)
    if c == "A_n1":
        n = 3 if n is None else n
        X = affine_D(2 * n + 1)
        mp = {i: 2 * n + 1 - i for i in range(2 * n + 2)}
        return _mk(c, X, mp, expected_type("A2n-1(2)", n), f"A{2*n-1}^(2)", n=n)
    if c == "A_n2":
        n = 3 if n is None else n
        X = affine_D(2 * n + 1)
        mp = {0: 2 * n, 2 * n: 1, 1: 2 * n + 1, 2 * n + 1: 0}
        mp.update({i: 2 * n + 1 - i for i in range(2, 2 * n)})
        return _mk(c, X, mp, expected_type("C(1)", n - 1), f"C{n-1}^(1)", n=n)
    if c == "A_n3":
        n = 2 if n is None else n
        X = affine_A(2 * n)
        mp = {i: 2 * n + 1 - i for i in range(1, 2 * n + 1)}
        mp[0] = 0
        return _mk(c, X, mp, expected_type("A2n(2)", n), f"A{2*n}^(2)", n=n)
    if c == "A_n4":
        n = 2 if n is None else n
        X = affine_A(2 * n + 1)
        mp = {i: 2 * n + 1 - i for i in range(2 * n + 2)}
        return _mk(c, X, mp, expected_type("C(1)", n), f"C{n}^(1)", n=n)
    if c == "A_n2'":
        X = affine_D(5)
        mp = {0: 4, 4: 1, 1: 5, 5: 0, 2: 3, 3: 2}
        return _mk(c, X, mp, expected_type("C(1)", 1), "A1^(1)", excluded=True)
    if c == "A_n3'":
        X = affine_A(2)
        return _mk(c, X, {0: 0, 1: 2, 2: 1}, expected_type("A2n(2)", 1), "A2^(2)", excluded=True)
    if c == "A_n4'":
        X = affine_A(3)
        return _mk(c, X, {0: 3, 3: 0, 1: 2, 2: 1}, expected_type("C(1)", 1), "A1^(1)", excluded=True)
    if c == "A_n5":
        n = 3 if n is None else n
        X = affine_A(n - 1)
        mp = {i: (i + 1) % n for i in range(n)}
        return _mk(c, X, mp, [[2]], "A1", excluded=True, n=n,
                   reason="sigma-fixed canonical basis is empty, so V_q = 0")
    if c == "A_a1":
        n = 3 if n is None else n
        X = affine_D(2 * n)
        mp = {0: 2 * n - 1, 2 * n - 1: 1, 1: 2 * n, 2 * n: 0}
        mp.update({i: 2 * n - i for i in range(2, 2 * n - 1)})
        return _mk(c, X, mp, expected_type("A2n(2)", n - 1), f"A{2*n-2}^(2)", n=n,
                   orientation="reversed relative to the A_n3 numbering")
    if c == "A_a1'":
        M = [[2, -1, 0, 0, 0], [-1, 2, -1, -1, -1], [0, -1, 2, 0, 0], [0, -1, 0, 2, 0], [0, -1, 0, 0, 2]]
        X = CartanDatum.from_matrix(["2", "1", "2'", "2''", "2'''"], M, "D4^(1)")
        mp = {"2": "2'", "2'": "2''", "2''": "2'''", "2'''": "2", "1": "1"}
        return _mk(c, X, mp, expected_type("A2n(2)", 1), "A2^(2)")
    if c == "A_a2":
        if n is None or m is None:
            n, m = 6, 3
        if n % m or not 1 < n // m < n:
            raise CartanError("A_a2 needs n = m*c with 1 < c < n")
        X = affine_A(n - 1)
        mp = {i: (i + m) % n for i in range(n)}
        exp = affine_A(m - 1).pairing if m > 1 else [[2]]
        return _mk(c, X, mp, [list(r) for r in exp], f"A{m-1}^(1)", n=n, m=m)
    raise CartanError(f"unknown case label {case!r}")


def load_datum_json(text: str) -> tuple[CartanDatum, DiagramAutomorphism]:
    """Parse ``{"labels": [...], "pairing": [[...]], "sigma": [...]}``."""
    d = json.loads(text)
    X = CartanDatum.from_matrix(d["labels"], d["pairing"], d.get("name", "custom"))
    sig = d.get("sigma")
    if sig is None:
        return X, DiagramAutomorphism.identity(X)
    return X, DiagramAutomorphism(X, tuple(X.index(s) for s in sig))


# -- epsilon renderings -----------------------------------------------

def epsilon_A(root: Sequence[int]) -> tuple[int, int]:
    """A_n root sum_{i<=k<j} a_k (1-based a_1..a_n) as (i, j) meaning e_i - e_j."""
    nz = [k for k, v in enumerate(root) if v]
    if not nz or any(root[k] != 1 for k in range(nz[0], nz[-1] + 1)):
        raise CartanError("not a positive root of type A")
    return (nz[0] + 1, nz[-1] + 2)


def epsilon_D(root: Sequence[int]) -> tuple[int, int, int]:
    """D_m positive root as (i, sign, j): e_i + sign*e_j with i < j.

    Simple roots a_k = e_k - e_{k+1} (k < m) and a_m = e_{m-1} + e_m.
    """
    m = len(root)
    vec = [0] * (m + 1)
    for k in range(m - 1):
        vec[k + 1] += root[k]
        vec[k + 2] -= root[k]
    vec[m - 1] += root[m - 1]
    vec[m] += root[m - 1]
    nz = [(k, v) for k, v in enumerate(vec) if v]
    if len(nz) != 2 or nz[0][1] != 1 or abs(nz[1][1]) != 1:
        raise CartanError(f"not a positive root of type D: {tuple(root)}")
    return (nz[0][0], nz[1][1], nz[1][0])


def render_epsilon(triple: tuple[int, int, int]) -> str:
    i, s, j = triple
    return f"e{i}{'+' if s > 0 else '-'}e{j}"
