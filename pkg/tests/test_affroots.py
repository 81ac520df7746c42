from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foldq.affroots import (
    AffineError,
    AffineFolding,
    AffineSystem,
    ConvexityError,
    O_consistency_check,
    build_infinite_word,
    classify_rows,
    classify_sigma_sets,
    convexity_violations,
    expected_sigma0,
    expected_sigma0_size,
    orbit_map_O,
    sigma0_plus,
    verify_convex,
    verify_orbit_bijection,
    verify_sigma0,
    verify_sigma_partition,
)
from foldq.cartan import affine_A, affine_D

CASES = [("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 2), ("C", 3), ("D", 1), ("D", 2), ("D", 3)]


def failures(rep):
    return [(c.identity, c.witness) for c in rep.checks if not c.ok]


def brute_real_positive(S: AffineSystem, M: int) -> set:
    """Real roots by the W-orbit of the simple roots, truncated at level M."""
    seen = {S.datum.simple_root(i) for i in range(S.rank)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(S.rank):
                r = S.datum.reflect(i, v)
                if all(c >= 0 for c in r) and S.level(r) <= M and r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return seen


def imaginary_image(F: AffineFolding, v) -> bool:
    """O(v) is a multiple of delta (v has finite part in Sigma_0)."""
    w = F.O(v).vector
    d = F.up.delta
    k = w[F.up.zero] // d[F.up.zero]
    return tuple(k * x for x in d) == w


def test_A2_affine_level_one_count():
    S = AffineSystem(affine_A(2), 0)
    assert len(S.enumerate_real_positive(1)) == 9
    level0 = [v for v in S.enumerate_real_positive(3) if S.level(v) == 0]
    assert set(level0) == set(S.finite_positive)


@pytest.mark.parametrize("X", [affine_A(2), affine_A(3), affine_D(4), affine_D(5)], ids=lambda X: X.name)
def test_enumeration_matches_weyl_orbit(X):
    S = AffineSystem(X, 0)
    M = 2
    assert set(S.enumerate_real_positive(M)) == brute_real_positive(S, M)


@pytest.mark.parametrize("n,classes", [(2, {"s", "2s"}), (3, {"s", "l", "2s"})])
def test_twisted_2s_roots_have_odd_level(n, classes):
    # the folded system of case A is A_{2n-2}^(2); for n = 2 there is no long class
    S = AffineFolding("A", n).down
    roots = S.enumerate_real_positive(6)
    assert {S.length_class(v) for v in roots} == classes
    two_s = [v for v in roots if S.length_class(v) == "2s"]
    assert two_s and all(S.level(v) % 2 == 1 for v in two_s)


def test_orbit_map_examples():
    F = AffineFolding("D", 2)
    img = F.O(F.theta)
    assert img.doubled
    assert F.folded_int(img.vector) == F.folded_int(tuple(2 * d + t for d, t in zip(F.up.delta, F.theta_bar)))
    C = AffineFolding("C", 2)
    a0 = C.up.datum.simple_root(0)
    d_minus = tuple(d - t for d, t in zip(C.up.delta, C.theta_bar_s))
    assert C.O(a0).vector == d_minus and not C.O(a0).doubled
    # a sigma-fixed root maps to itself unless it is beta + sigma(beta) for a root beta
    A = AffineFolding("A", 2)
    plain = [v for v in A.up.enumerate_real_positive(1) if A.sigma.apply_root(v) == v]
    assert plain and all(A.O(v).vector == v and not A.O(v).doubled for v in plain)
    doubled = [v for v in C.up.enumerate_real_positive(1) if C.sigma.apply_root(v) == v]
    assert doubled and all(C.O(v).doubled and C.O(v).vector == tuple(2 * x for x in v) for v in doubled)
    for v in doubled:
        halves = [b for b in C.up.enumerate_real_positive(1)
                  if tuple(x + y for x, y in zip(b, C.sigma.apply_root(b))) == v]
        assert halves and all(C.O(b).vector == C.O(v).vector for b in halves)
    assert orbit_map_O(a0, "C", 2) == C.O(a0)


@pytest.mark.parametrize("case,n", CASES)
def test_O_table(case, n):
    rep = O_consistency_check(case, n)
    assert rep.ok, failures(rep)


def test_sigma0_examples():
    C = AffineFolding("C", 2)
    assert {C.epsilon(a) for a in C.sigma0_plus} == {"e1+e5", "e2+e4"}
    for n in (1, 2, 3):
        D = AffineFolding("D", n)
        assert [D.epsilon(a) for a in D.sigma0_plus] == [f"e{n + 1}-e{2 * n + 2}"]
    assert len(sigma0_plus("A", 3)) == 4


@pytest.mark.parametrize("case,n", CASES)
def test_sigma0_sets(case, n):
    F = AffineFolding(case, n)
    assert {F.epsilon(a) for a in F.sigma0_plus} == expected_sigma0(case, n)
    assert len(F.sigma0_plus) == expected_sigma0_size(case, n)
    rep = verify_sigma0(case, n)
    assert rep.ok, failures(rep)


@pytest.mark.parametrize("case,n", CASES)
def test_sigma_partition(case, n):
    rep = verify_sigma_partition(case, n)
    assert rep.ok, failures(rep)
    F = AffineFolding(case, n)
    labels = [classify_sigma_sets(a, case, n) for a in F.up.finite_positive]
    assert len(labels) == len(F.up.finite_positive)
    assert set(labels) <= set(F.allowed)


@pytest.mark.parametrize("case,n", [c for c in CASES if c != ("D", 1)])
def test_orbit_bijection(case, n):
    rep = verify_orbit_bijection(case, n, 8 if case == "D" else 4)
    assert rep.ok, failures(rep)


@pytest.mark.parametrize("case,n", [("A", 2), ("B", 3), ("C", 2), ("D", 2)])
def test_O_image_is_folded_positive_root(case, n):
    F = AffineFolding(case, n)
    sigma0 = set(F.sigma0_plus)
    for v in F.up.enumerate_real_positive(3):
        if imaginary_image(F, v):
            x = F.up.finite_part(v)
            gamma = x if all(c >= 0 for c in x) else tuple(-c for c in x)
            assert gamma in sigma0
            continue
        w = F.folded_int(F.O(v).vector)
        assert F.down.is_positive_root(w) and F.down.is_real_root(w)


@pytest.mark.parametrize("case,n", [("A", 2), ("B", 3), ("C", 3), ("D", 2)])
def test_sigma_permutes_real_roots(case, n):
    F = AffineFolding(case, n)
    window = set(F.up.enumerate_real_positive(8))
    for v in F.up.enumerate_real_positive(2):
        sv = F.sigma.apply_root(v)
        assert sv in window
        assert F.O(sv).vector == F.O(v).vector
    # the roots whose O-image has folded level <= 1 form a sigma-stable set
    low = {v for v in window
           if not imaginary_image(F, v) and F.folded_level(F.folded_int(F.O(v).vector)) <= 1}
    assert {F.sigma.apply_root(v) for v in low} == low


def test_convexity_checker_catches_planted_violation():
    a, b = (1, 0), (0, 1)
    assert convexity_violations([a, (1, 1), b]) == []
    assert convexity_violations([a, b, (1, 1)]) == [(a, b, (1, 1))]
    with pytest.raises(ConvexityError):
        convexity_violations([a, a])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_shuffled_orders_are_usually_caught(seed):
    F = AffineFolding("C", 2)
    w = build_infinite_word(F, 30)
    order = list(reversed(w["left"]))
    rng = random.Random(seed)
    i, j = sorted(rng.sample(range(len(order)), 2))
    swapped = list(order)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    # the reversed left half of a reduced word is convex; swapping two entries may or may not break it
    assert convexity_violations(order) == []
    bad = convexity_violations(swapped)
    assert all(x[2] in set(order) for x in bad)


def test_infinite_word_base_case():
    F = AffineFolding("C", 2)
    w = build_infinite_word(F, 20)
    period = w["period"]
    i0 = period[-1]
    assert w["left"][0] == F.up.datum.simple_root(i0)
    assert len(set(w["left"])) == len(w["left"])
    assert all(F.up.is_positive_root(v) for v in w["left"] + w["right"])


@pytest.mark.parametrize("case,n", [("A", 2), ("B", 3), ("C", 2), ("D", 2)])
def test_convex_orders(case, n):
    rep = verify_convex(case, n, window=200, seed=0)
    assert rep.ok, failures(rep)
    assert len(rep.order) >= 200


def test_excluded_affine_cases():
    with pytest.raises(AffineError):
        verify_convex("D", 1)
    with pytest.raises(AffineError):
        verify_convex("B", 2)
    with pytest.raises(AffineError):
        AffineFolding("Q", 2)


def test_classify_rows_are_deterministic():
    a = classify_rows("C", 2, 1)
    b = classify_rows("C", 2, 1)
    assert a == b
    assert {r["level"] for r in a} == {0, 1}
