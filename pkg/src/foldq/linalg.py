"""Exact linear algebra over Z[q, q^-1] and Q(q).

Rank and independence are decided by specialising q to an integer and
working modulo a large prime: a nonzero minor after specialisation is a
nonzero minor generically, so "independent" answers are exact.  Solving
uses fraction-free elimination on an independent square subsystem.
"""

from __future__ import annotations

from typing import Sequence

from .qcoeff import LaurentPoly, RatFn, as_coeff

_PRIME = (1 << 61) - 1
_POINTS = (7, 11, 13, 101)


def _specialize(x, t: int, P: int = _PRIME) -> int | None:
    """Value of a coefficient at q = t modulo P (None if a pole)."""
    if isinstance(x, int):
        return x % P
    if isinstance(x, LaurentPoly):
        tinv = pow(t, -1, P)
        s = 0
        for e, v in x.items():
            s += v * (pow(t, e, P) if e >= 0 else pow(tinv, -e, P))
        return s % P
    num = _specialize(x.num, t, P)
    den = _specialize(x.den, t, P)
    if not den:
        return None
    return num * pow(den, -1, P) % P


def rank_mod(rows: Sequence[Sequence[int]], P: int = _PRIME) -> tuple[int, list[int], list[int]]:
    """Rank, pivot rows and pivot columns of an integer matrix over F_P."""
    A = [list(r) for r in rows]
    if not A:
        return 0, [], []
    ncol = len(A[0])
    order = list(range(len(A)))
    piv_rows, piv_cols = [], []
    r = 0
    for c in range(ncol):
        k = next((k for k in range(r, len(A)) if A[k][c] % P), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        order[r], order[k] = order[k], order[r]
        inv = pow(A[r][c], -1, P)
        for k2 in range(r + 1, len(A)):
            f = A[k2][c] * inv % P
            if f:
                row_r = A[r]
                A[k2] = [(a - f * b) % P for a, b in zip(A[k2], row_r)]
        piv_rows.append(order[r])
        piv_cols.append(c)
        r += 1
        if r == len(A):
            break
    return r, piv_rows, piv_cols


def specialised_matrix(M: Sequence[Sequence], t: int) -> list[list[int]] | None:
    out = []
    for row in M:
        vals = []
        for x in row:
            v = _specialize(x, t)
            if v is None:
                return None
            vals.append(v)
        out.append(vals)
    return out


def generic_rank_lower_bound(M: Sequence[Sequence]) -> int:
    """max rank over a few specialisations; equals the generic rank in practice
    and is always a valid lower bound."""
    best = 0
    for t in _POINTS:
        S = specialised_matrix(M, t)
        if S is None:
            continue
        best = max(best, rank_mod(S)[0])
    return best


def is_full_row_rank(M: Sequence[Sequence]) -> bool:
    return generic_rank_lower_bound(M) == len(M)


def is_nonsingular(M: Sequence[Sequence]) -> bool:
    return len(M) == (len(M[0]) if M else 0) and is_full_row_rank(M)


def _det_bareiss(M: list[list[LaurentPoly]]) -> LaurentPoly:
    n = len(M)
    A = [row[:] for row in M]
    sign = 1
    prev = LaurentPoly.const(1)
    for k in range(n - 1):
        if A[k][k].is_zero():
            sw = next((r for r in range(k + 1, n) if not A[r][k].is_zero()), None)
            if sw is None:
                return LaurentPoly()
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).exact_div(prev)
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return -d if sign < 0 else d


def solve_square(A: Sequence[Sequence], b: Sequence) -> list:
    """Solve A x = b exactly for a nonsingular square A with coefficients in
    Z[q^+-1] or Q(q).  Fraction-free (Bareiss) elimination on an augmented
    matrix; returns RatFn/LaurentPoly entries."""
    n = len(A)
    rows = [list(A[i]) + [b[i]] for i in range(n)]
    # clear denominators row by row
    M: list[list[LaurentPoly]] = []
    for row in rows:
        den = LaurentPoly.const(1)
        for x in row:
            if isinstance(x, RatFn) and not x.is_laurent():
                den = den * x.den
        M.append([_to_poly(x, den) for x in row])
    sign_perm = list(range(n))
    prev = LaurentPoly.const(1)
    for k in range(n):
        if M[k][k].is_zero():
            sw = next((r for r in range(k + 1, n) if not M[r][k].is_zero()), None)
            if sw is None:
                raise ArithmeticError("singular system")
            M[k], M[sw] = M[sw], M[k]
            sign_perm[k], sign_perm[sw] = sign_perm[sw], sign_perm[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]).exact_div(prev)
            M[i][k] = LaurentPoly()
        prev = M[k][k]
    x: list = [None] * n
    for i in range(n - 1, -1, -1):
        acc = RatFn(M[i][n])
        for j in range(i + 1, n):
            acc = acc - M[i][j] * x[j]
        x[i] = as_coeff(acc / M[i][i])
    return x


def _to_poly(x, den: LaurentPoly) -> LaurentPoly:
    if isinstance(x, int):
        return den * x
    if isinstance(x, LaurentPoly):
        return x * den
    r = x * den
    if not r.is_laurent():
        raise ArithmeticError("denominator clearing failed")
    return r.to_laurent()


def solve_overdetermined(columns: Sequence[Sequence], target: Sequence) -> list:
    """Coefficients a with sum_k a_k columns[k] = target.

    columns[k] and target are equal-length coefficient vectors.  Picks an
    independent square subsystem by specialisation, solves it, and verifies
    the full system exactly.
    """
    ncols = len(columns)
    if ncols == 0:
        if any(not _is_zero(t) for t in target):
            raise ArithmeticError("inconsistent system")
        return []
    nrows = len(target)
    rowsM = [[columns[k][r] for k in range(ncols)] for r in range(nrows)]
    chosen = None
    for t in _POINTS:
        S = specialised_matrix(rowsM, t)
        if S is None:
            continue
        rk, prow, _ = rank_mod(S)
        if rk == ncols:
            chosen = sorted(prow)
            break
    if chosen is None:
        raise ArithmeticError("columns are not independent")
    A = [rowsM[r] for r in chosen]
    b = [target[r] for r in chosen]
    x = solve_square(A, b)
    for r in range(nrows):
        acc = RatFn(LaurentPoly())
        for k in range(ncols):
            if not _is_zero(rowsM[r][k]):
                acc = acc + x[k] * rowsM[r][k]
        if acc != target[r]:
            raise ArithmeticError("inconsistent system")
    return x


def _is_zero(x) -> bool:
    if isinstance(x, int):
        return x == 0
    return x.is_zero()


def determinant(M: Sequence[Sequence]) -> LaurentPoly | RatFn:
    n = len(M)
    if n == 0:
        return LaurentPoly.const(1)
    den = LaurentPoly.const(1)
    rows = []
    for row in M:
        d = LaurentPoly.const(1)
        for x in row:
            if isinstance(x, RatFn) and not x.is_laurent():
                d = d * x.den
        rows.append([_to_poly(x, d) for x in row])
        den = den * d
    det = _det_bareiss(rows)
    return as_coeff(RatFn(det, den))
