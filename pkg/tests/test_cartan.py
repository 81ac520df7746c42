from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foldq.cartan import (
    PRESET_NAMES,
    CartanDatum,
    CartanError,
    DiagramAutomorphism,
    load_datum_json,
    preset,
    type_A,
    type_C,
    type_D,
)


def brute_positive_roots(X: CartanDatum, bound: int = 6) -> set[tuple[int, ...]]:
    """Positive roots of a finite datum as the W-orbit of the simple roots, kept positive."""
    seen = {X.simple_root(i) for i in range(X.rank)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for b in frontier:
            for i in range(X.rank):
                r = X.reflect(i, b)
                if all(c >= 0 for c in r) and any(r) and r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return seen


def test_F_n1_preset_is_A4_with_flip():
    pr = preset("F_n1", 2)
    assert pr.X.rank == 4
    assert pr.sigma.apply_root((1, 0, 0, 0)) == (0, 0, 0, 1)
    assert pr.sigma.apply_root((0, 1, 0, 0)) == (0, 0, 1, 0)
    assert pr.expected_name == "C2"


def test_A_n3_preset():
    pr = preset("A_n3", 2)
    assert pr.X.name == "A4^(1)"
    assert pr.sigma.apply_root((1, 0, 0, 0, 0)) == (1, 0, 0, 0, 0)
    assert pr.sigma.apply_root((0, 1, 0, 0, 0)) == (0, 0, 0, 0, 1)
    assert pr.expected_name == "A4^(2)"


def test_A_n5_is_excluded():
    assert preset("A_n5", 3).excluded
    assert not preset("F_n1", 2).excluded


def test_fold_A2_is_rank_one_with_d4():
    F = preset("A2").folded
    assert F.pairing == ((8,),)
    assert F.d(0) == 4


def test_fold_A4_is_C2():
    F = preset("F_n1", 2).folded
    assert F.pairing[0][0] == 4 and F.pairing[1][1] == 8
    assert F.cartan_matrix == ((2, -1), (-2, 2))


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_every_preset_folds_to_declared_type(name):
    pr = preset(name)
    assert pr.fold_matches()
    for i in range(pr.X.rank):
        for j in range(pr.X.rank):
            si, sj = pr.sigma.perm[i], pr.sigma.perm[j]
            assert pr.X.pairing[si][sj] == pr.X.pairing[i][j]


def test_admissibility_is_computed():
    assert preset("A2").sigma.delta == (2,)
    assert preset("F_n1", 2).sigma.delta == (1, 2)
    assert not preset("A2").sigma.admissible
    assert preset("A_a2").sigma.admissible
    assert not preset("A_n4", 2).sigma.admissible


def test_A4_has_ten_roots():
    assert len(type_A(4).positive_roots) == 10


def test_beta_sequence_A2():
    assert type_A(2).beta_sequence((0, 1, 0)) == [(1, 0), (1, 1), (0, 1)]


def test_lifted_words():
    s = preset("F_n1", 2).sigma
    X = preset("F_n1", 2).X
    lifted = s.lift_sequence((0, 1, 0, 1))
    assert [X.labels[i] for i in lifted] == ["1", "4", "2", "3", "2", "1", "4", "2", "3", "2"]
    assert preset("A2").sigma.lift_sequence((0,)) == (0, 1, 0)


def test_lifted_A4_order():
    pr = preset("F_n1", 2)
    betas = pr.X.beta_sequence(pr.sigma.lift_sequence((0, 1, 0, 1)))
    assert betas == [(1, 0, 0, 0), (0, 0, 0, 1), (1, 1, 0, 0), (1, 1, 1, 1), (0, 0, 1, 1),
                     (0, 1, 1, 1), (1, 1, 1, 0), (0, 1, 0, 0), (0, 1, 1, 0), (0, 0, 1, 0)]


@pytest.mark.parametrize("X", [type_A(2), type_A(3), type_A(4), type_C(2), type_C(3), type_D(4)],
                         ids=lambda X: X.name)
def test_beta_sequence_enumerates_positive_roots(X):
    betas = X.beta_sequence(X.longest_word())
    assert len(set(betas)) == len(betas)
    assert set(betas) == brute_positive_roots(X) == set(X.positive_roots)


@pytest.mark.parametrize("name,n", [("A2", None), ("F_n1", 2), ("F_n1", 3)])
def test_lift_is_length_additive_and_sigma_stable(name, n):
    pr = preset(name, n)
    F = pr.folded
    ul = F.longest_word()
    lifted = pr.sigma.lift_sequence(ul)
    assert len(lifted) == sum(len(pr.sigma.block(e)) for e in ul)
    assert pr.X.is_reduced(lifted)
    betas = pr.X.beta_sequence(lifted)
    assert {pr.sigma.apply_root(b) for b in betas} == set(betas) == set(pr.X.positive_roots)
    for e in range(F.rank):
        blk = pr.sigma.block(e)
        assert tuple(pr.sigma.perm[i] for i in blk) in {blk, tuple(reversed(blk))} or \
            set(pr.sigma.perm[i] for i in blk) == set(blk)


def kostant_brute(roots, nu):
    """Number of multisets of roots summing to nu."""
    roots = sorted(roots)

    def rec(k, left):
        if not any(left):
            return 1
        if k == len(roots):
            return 0
        total = 0
        r = roots[k]
        m = 0
        cur = list(left)
        while all(c >= 0 for c in cur):
            total += rec(k + 1, tuple(cur))
            cur = [c - x for c, x in zip(cur, r)]
            m += 1
        return total

    return rec(0, tuple(nu))


@pytest.mark.parametrize("nu", [(1, 1, 1, 1), (1, 2, 2, 1), (2, 1, 0, 1), (0, 2, 2, 0)])
def test_kostant_count_matches_brute_force(nu):
    X = type_A(4)
    assert X.kostant_count(nu) == kostant_brute(X.positive_roots, nu)


def test_cartan_datum_invariants_rejected():
    with pytest.raises(CartanError):
        CartanDatum.from_matrix(["1", "2"], [[2, 1], [1, 2]])
    with pytest.raises(CartanError):
        CartanDatum.from_matrix(["1", "2"], [[3, -1], [-1, 2]])


def test_load_datum_json_roundtrip():
    X, s = load_datum_json('{"labels": ["a", "b"], "pairing": [[2, -1], [-1, 2]], "sigma": ["b", "a"]}')
    assert X.rank == 2 and s.order == 2
    assert s.fold().pairing == ((8,),)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=8))
def test_reflections_are_involutions(word):
    X = type_A(4)
    beta = (1, 1, 0, 1)
    for i in word:
        assert X.reflect(i, X.reflect(i, beta)) == beta
    w = X.act(word, beta)
    assert X.form(w, w) == X.form(beta, beta)


def test_sigma_orbit_of_word_roots_permutes_positive_roots():
    pr = preset("F_n1", 2)
    for w in itertools.islice(itertools.permutations(range(4)), 6):
        betas = pr.X.beta_sequence(w)
        assert all(any(c > 0 for c in pr.sigma.apply_root(b)) for b in betas)


def test_identity_automorphism():
    X = type_A(3)
    s = DiagramAutomorphism.identity(X)
    assert s.order == 1 and s.fold().pairing == X.pairing
