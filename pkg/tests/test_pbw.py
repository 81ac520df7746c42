from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foldq.cartan import preset, type_A
from foldq.pbw import (
    PBWAlgebra,
    PBWOrder,
    a2_closed_form,
    canonical_basis,
    expand_in_pbw,
    modified_index,
    modified_pbw,
    pbw_monomial,
    rank2_A2_canonical,
    rank2_relation,
    root_vector,
    sigma_fixed_modified,
    sigma_permutation,
)
from foldq.qcoeff import LaurentPoly, RatFn, qfact
from foldq.ualg import UMinusElt

q = LaurentPoly.monomial(1)
A2 = type_A(2)
O121 = PBWOrder.from_word(A2, (0, 1, 0))
O212 = PBWOrder.from_word(A2, (1, 0, 1))
S_A2 = preset("A2").sigma
PR4 = preset("F_n1", 2)
O4 = PBWOrder.lifted(PR4.sigma)


def W(X, parts, c=1):
    return UMinusElt.word(X, parts, c)


def weights(rank, hmax, hmin=0):
    for nu in itertools.product(range(hmax + 1), repeat=rank):
        if hmin <= sum(nu) <= hmax:
            yield nu


def as_set(elts):
    out = []
    for x in elts:
        if not any(x.equals(y) for y in out):
            out.append(x)
    return out


def same_set(xs, ys):
    return len(xs) == len(ys) and all(any(x.equals(y) for y in ys) for x in xs)


def test_root_vectors():
    assert root_vector(O121, 2).equals(W(A2, [1, 0]) - W(A2, [0, 1], q))
    X = PR4.X
    # in the lifted A4 order the ninth root is alpha_2 + alpha_2'
    assert O4.betas[8] == (0, 1, 1, 0)
    assert root_vector(O4, 9).equals(W(X, [2, 1]) - W(X, [1, 2], q))
    assert root_vector(O4, 1, 3).equals(W(X, [(O4.word[0], 3)]))


def test_root_vector_weights():
    for k in range(1, O4.N + 1):
        x = root_vector(O4, k, 2)
        assert x.weight() == tuple(2 * b for b in O4.betas[k - 1])


def _coords(x, order):
    return {k: RatFn(v) for k, v in expand_in_pbw(x, order).items()}


def test_expand_in_pbw():
    for c in O121.indices((2, 1)):
        assert _coords(pbw_monomial(O121, c), O121) == {c: RatFn(1)}
    # f2 f1 = f12 + q f1 f2
    assert _coords(W(A2, [1, 0]), O121) == {(0, 1, 0): RatFn(1), (1, 0, 1): RatFn(q)}


def test_expansion_reconstructs():
    x = W(A2, [(1, 1), (0, 2), (1, 1)]) + W(A2, [1, 0, 1, 0], q ** 3)
    e = expand_in_pbw(x, O121)
    back = UMinusElt.zero(A2)
    for c, v in e.items():
        back = back + pbw_monomial(O121, c).scale(v)
    assert back.equals(x)


def test_straightening_instance():
    lhs, rhs = rank2_relation(A2, 1, 1, 1, 2)
    assert lhs.equals(rhs)


def test_canonical_basis_small():
    assert [b.index for b in canonical_basis((0, 0), O121)] == [(0, 0, 0)]
    cb = [b.to_uminus() for b in canonical_basis((1, 1), O121)]
    assert same_set(cb, [W(A2, [0, 1]), W(A2, [1, 0])])


@pytest.mark.parametrize("h", range(0, 9))
def test_a2_canonical_basis_is_closed_form(h):
    for a in range(h + 1):
        nu = (a, h - a)
        cb = [b.to_uminus() for b in canonical_basis(nu, O121)]
        assert same_set(cb, a2_closed_form(A2, nu))


def test_canonical_index_gives_monomial():
    # L = f1^(m-l) f12^(l) f2^(n) with m >= l + n has b = f2^(l) f1^(m) f2^(n)
    for ell, m, n in [(0, 1, 1), (1, 2, 1), (1, 3, 2), (2, 4, 1)]:
        c = (m - ell, ell, n)
        nu = (m, ell + n)
        b = next(b for b in canonical_basis(nu, O121) if b.index == c)
        assert b.to_uminus().equals(W(A2, [(1, ell), (0, m), (1, n)]))


def test_rank2_closed_form_function():
    for c in [(1, 0, 0), (0, 1, 0), (2, 1, 1), (1, 1, 2), (2, 2, 2), (0, 2, 3)]:
        nu = (c[0] + c[1], c[1] + c[2])
        b = next(b for b in canonical_basis(nu, O121) if b.index == c)
        assert rank2_A2_canonical(A2, c).equals(b.to_uminus())
    assert rank2_A2_canonical(A2, (1, 0, 0)).equals(W(A2, [0]))
    assert rank2_A2_canonical(A2, (0, 1, 0)).equals(W(A2, [1, 0]))
    for a in (1, 2, 3):
        x = rank2_A2_canonical(A2, (a, a, a))
        assert x.equals(W(A2, [(1, a), (0, 2 * a), (1, a)]))
        assert x.equals(W(A2, [(0, a), (1, 2 * a), (0, a)]))


def test_canonical_normalisation_and_integrality():
    for nu in weights(2, 6, 1):
        for b in canonical_basis(nu, O121):
            assert b.pbw[b.index] == 1
            for c, v in b.pbw.items():
                assert isinstance(v, (int, LaurentPoly))
                if c != b.index:
                    assert c > b.index
                    assert LaurentPoly({}) == v or (isinstance(v, LaurentPoly) and v.min_exp() >= 1)


def test_canonical_basis_independent_of_reduced_word():
    for nu in weights(2, 6, 1):
        a = [b.to_uminus() for b in canonical_basis(nu, O121)]
        b = [b.to_uminus() for b in canonical_basis(nu, O212)]
        assert same_set(a, b)
    X = PR4.X
    other = PBWOrder.from_word(X)
    assert other.word != O4.word
    for nu in [(1, 1, 1, 0), (1, 1, 1, 1), (0, 1, 2, 1), (1, 2, 1, 0)]:
        a = [b.to_uminus() for b in canonical_basis(nu, O4)]
        b = [b.to_uminus() for b in canonical_basis(nu, other)]
        assert same_set(a, b)


def test_sigma_permutes_canonical_basis_A2():
    for nu in weights(2, 8, 1):
        snu = (nu[1], nu[0])
        if snu == nu:
            perm = sigma_permutation(nu, O121, S_A2)
            assert sorted(perm) == sorted(b.index for b in canonical_basis(nu, O121))
        elif nu < snu:
            images = [b.to_uminus().sigma(S_A2) for b in canonical_basis(nu, O121)]
            assert same_set(images, [b.to_uminus() for b in canonical_basis(snu, O121)])


def test_sigma_permutes_canonical_basis_A4():
    for nu in weights(4, 6, 1):
        if tuple(reversed(nu)) != nu:
            continue
        perm = sigma_permutation(nu, O4, PR4.sigma)
        assert sorted(perm) == sorted(perm.values())
        assert all(perm[perm[c]] == c for c in perm)


@pytest.mark.parametrize("a", [1, 2, 3])
def test_no_sigma_fixed_pbw_elements(a):
    A = PBWAlgebra.get(O121)
    nu = (2 * a, 2 * a)
    for c in O121.indices(nu):
        assert A.sigma(S_A2, A.unit(c)) != A.unit(c)
    # sigma(f1^(a) f12^(a) f2^(a)) is f2^(a) f'12^(a) f1^(a), a different element
    x = A.to_uminus(A.unit((a, a, a)))
    f12p = W(A2, [0, 1]) - W(A2, [1, 0], q)
    y = W(A2, [(1, a)]) * (f12p ** a).scale(RatFn(LaurentPoly.const(1), qfact(a))) * W(A2, [(0, a)])
    assert x.sigma(S_A2).equals(y)
    assert not y.equals(x)


@pytest.mark.parametrize("a", [1, 2])
def test_sigma_fixed_canonical_at_2a_2a(a):
    nu = (2 * a, 2 * a)
    cb = [b.to_uminus() for b in canonical_basis(nu, O121)]
    fixed = [b for b in cb if b.sigma(S_A2).equals(b)]
    assert len(fixed) == 1
    assert fixed[0].equals(W(A2, [(1, a), (0, 2 * a), (1, a)]))


def test_modified_pbw_basics():
    oA = PBWOrder.lifted(S_A2)
    A = PBWAlgebra.get(oA)
    assert modified_pbw(oA, (0, 0, 0)) == A.one()
    for a in (1, 2):
        x = A.to_uminus(sigma_fixed_modified(oA, (a,)))
        assert x.equals(W(A2, [(1, a), (0, 2 * a), (1, a)]))
        assert x.sigma(S_A2).equals(x)
    assert modified_index(O4, (1, 2, 0, 1)) == (1, 1, 2, 2, 2, 0, 0, 1, 1, 1)


def test_modified_pbw_for_admissible_blocks_is_ordinary():
    pr = preset("F_n1", 2)
    o = PBWOrder.lifted(pr.sigma)
    A = PBWAlgebra.get(o)
    c = (1, 2, 0, 0, 0, 1, 0, 0, 0, 0)
    assert modified_pbw(o, c) == A.unit(c)


def _modified_indices(order, hmax):
    for nu in weights(order.datum.rank, hmax, 1):
        yield from order.indices(nu)


def test_modified_pbw_is_unitriangular_A4():
    n = 0
    for c in _modified_indices(O4, 6):
        v = modified_pbw(O4, c)
        assert v.get(c) == 1
        for d, coeff in v.items():
            if d != c:
                assert d > c
                assert isinstance(coeff, LaurentPoly) and coeff.min_exp() >= 1
        n += 1
    assert n == sum(len(O4.indices(nu)) for nu in weights(4, 6, 1))


def test_sigma_permutes_modified_pbw_A4():
    A = PBWAlgebra.get(O4)
    s = PR4.sigma
    fixed_shapes = set()
    for nu in weights(4, 5, 1):
        if tuple(reversed(nu)) != nu:
            continue
        idx = O4.indices(nu)
        vecs = {c: modified_pbw(O4, c) for c in idx}
        images = [A.sigma(s, v) for v in vecs.values()]
        assert all(any(img == w for w in vecs.values()) for img in images)
        for c, v in vecs.items():
            if A.sigma(s, v) == v:
                fixed_shapes.add(c)
    shaped = set()
    for ul in itertools.product(range(3), repeat=len(O4.blocks)):
        c = modified_index(O4, ul)
        if 0 < sum(x * sum(b) for x, b in zip(c, O4.betas)) <= 5:
            shaped.add(c)
    assert fixed_shapes == shaped


@settings(max_examples=30, deadline=None)
@given(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)))
def test_a2_canonical_bar_invariant(c):
    nu = (c[0] + c[1], c[1] + c[2])
    b = next(b for b in canonical_basis(nu, O121) if b.index == c)
    x = b.to_uminus()
    assert x.bar().equals(x)
