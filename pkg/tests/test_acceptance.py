"""Acceptance suite: one test per criterion, each printing a pass/fail line."""

from __future__ import annotations

import itertools
import time

from foldq import affroots, folding, pbw, suites
from foldq.cartan import CartanDatum
from foldq.report import Report


def _line(n: int, ok: bool, what: str, reps: list[Report] = (), extra: str = "") -> None:
    total = sum(len(r.checks) for r in reps)
    failed = [c for r in reps for c in r.checks if not c.ok]
    msg = f"criterion {n}: {'PASS' if ok else 'FAIL'} {what}"
    if reps:
        msg += f" ({total - len(failed)}/{total} checks)"
    if extra:
        msg += f" {extra}"
    print(msg)
    for c in failed:
        print(f"  FAIL {c.identity}: {c.witness}")


def _require(n: int, what: str, reps: list[Report], extra: str = "", cond: bool = True) -> None:
    ok = cond and all(r.ok for r in reps) and all(r.checks for r in reps)
    _line(n, ok, what, reps, extra)
    assert ok


# independent oracles


def positive_roots_by_orbit(X: CartanDatum) -> set[tuple[int, ...]]:
    """Positive roots as the W-orbit of the simple roots, kept positive."""
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


def kostant_brute(roots, nu) -> int:
    """Number of multisets of roots summing to nu."""
    roots = sorted(roots)

    def rec(k, left):
        if not any(left):
            return 1
        if k == len(roots):
            return 0
        total, cur = 0, list(left)
        while all(c >= 0 for c in cur):
            total += rec(k + 1, tuple(cur))
            cur = [c - x for c, x in zip(cur, roots[k])]
        return total

    return rec(0, tuple(nu))


# criteria


def test_criterion_1_rank2_straightening_in_shuffle_form():
    t = time.perf_counter()
    rep = pbw.verify_rank2_relations(bound=3)
    dt = time.perf_counter() - t
    _require(1, "A2 straightening formulas, 0 <= l, m, n <= 3", [rep], f"in {dt:.2f}s", dt < 10)


def test_criterion_2_a2_canonical_basis_and_sigma_fixed():
    rep = pbw.verify_a2_canonical(height_max=8, sigma_max=2)
    labels = [c.identity for c in rep.checks]
    for a in (1, 2):
        assert any(f"sigma-fixed canonical basis at ({2 * a}, {2 * a})" in s for s in labels)
        assert f"no sigma-fixed PBW element at ({2 * a}, {2 * a})" in labels
    _require(2, "A2 canonical basis = closed-form monomials (height <= 8), sigma-fixed sets for a <= 2", [rep])


def test_criterion_3_rank2_power_congruence():
    t = time.perf_counter()
    rep = folding.verify_rank2_power_congruence(a_max=3)
    dt = time.perf_counter() - t
    assert len(rep.checks) == 6
    _require(3, "power congruence over F2 for a = 1, 2, 3", [rep], f"in {dt:.2f}s", dt < 600)


def test_criterion_4_folded_serre_and_alternating_sums():
    serre = folding.verify_folded_serre()
    for c in serre.checks:
        print(f"  {'ok  ' if c.ok else 'FAIL'} {c.identity}")
    # the two folded Serre relations, five intermediate congruences, two upstairs identities, two in V_q
    assert len(serre.checks) == 11
    F = suites.verify_alternating_F(a_max=8)
    assert len(F.checks) == 8
    _require(4, "(A4, C2) over F2: folded Serre relations, each intermediate congruence, F_a = 0 for a <= 8",
             [serre, F])


def test_criterion_5_modified_pbw_images_and_braid_identities():
    t = time.perf_counter()
    images = folding.verify_modified_pbw_images(height_max=6)
    braid = folding.verify_braid_identities()
    dt = time.perf_counter() - t
    assert sum(c.identity.startswith(("(a)", "(b)", "(c)", "(d)")) for c in braid.checks) == 4
    _require(5, "(A4, C2) Phi(L) = pi(L#) and Phi(b) = pi(b#) at height <= 6, braid identities (a)-(d)",
             [images, braid], f"in {dt:.1f}s")


def _dims(case: str, n: int | None, height_max: int) -> Report:
    ctx = folding.context(case, n)
    roots = positive_roots_by_orbit(ctx.folded)
    rep = Report(f"dims-{case}")
    for ul_nu in itertools.product(range(height_max + 1), repeat=ctx.folded.rank):
        if not 0 < sum(ul_nu) <= height_max:
            continue
        fixed = len(ctx.fixed_indices(ctx.upstairs_weight(ul_nu)))
        dim = kostant_brute(roots, ul_nu)
        rep.add(f"|B^sigma| over folded weight {list(ul_nu)} = {dim}", fixed == dim, f"{fixed} vs {dim}")
    return rep


def test_criterion_6_fixed_points_count_folded_dimension():
    a2 = _dims("A2", None, 5)
    a4 = _dims("F_n1", 2, 4)
    _require(6, "|B^sigma(nu)| = brute-force folded Kostant count, (A2, C1) h <= 5 and (A4, C2) h <= 4", [a2, a4])


def test_criterion_7_affine_combinatorics():
    reps = []
    for case, n in suites.AFFINE_CASES:
        parts = [affroots.verify_sigma0(case, n), affroots.O_consistency_check(case, n),
                 affroots.verify_sigma_partition(case, n)]
        if not (case == "D" and n == 1):
            parts.append(affroots.verify_orbit_bijection(case, n, 8 if case == "D" else 4))
        print(f"  {case}{n}: " + ", ".join(f"{r.suite} {'ok' if r.ok else 'FAIL'}" for r in parts))
        reps.extend(parts)
    _require(7, "Sigma_0^+ sets, O tables, Sigma partitions and orbit bijection rows for cases A-D", reps)


def test_criterion_8_convex_orders():
    reps = []
    for case, n in suites.CONVEX_PRESETS:
        r = affroots.verify_convex(case, n, window=200, seed=0, orderings=3)
        assert r.data["window_size"] >= 200
        assert sum("no convexity violations" in c.identity for c in r.checks) == 3
        print(f"  {case}{n}: window {r.data['window_size']} roots, {'ok' if r.ok else 'FAIL'}")
        reps.append(r)
    _require(8, "zero convexity violations on windows >= 200 roots, 3 orderings per case A-D", reps)


def test_criterion_9_property_suites():
    reps = suites.run("serre", seed=0, workers=1) + suites.run("properties", seed=0, workers=1)
    for r in reps:
        print(f"  {r.suite}: {'ok' if r.ok else 'FAIL'} ({len(r.checks)} checks)")
    j = [r for r in reps if r.suite.startswith("j-consistency")]
    assert j and all(len(r.checks) >= 20 for r in j)
    _require(9, "Serre vanishing, bar/star/sigma laws, Gram nonsingularity, Phi properties, J-projection", reps)
