"""Named verification suites and the property checks that span modules.

Each target maps to a list of (label, callable, kwargs); the callables are
module-level so they can run in worker processes.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

from . import affroots, folding, pbw
from .cartan import PRESET_NAMES, CartanDatum, preset, type_A
from .linalg import is_nonsingular
from .qcoeff import LaurentPoly, gauss_alternating_F
from .report import Report
from .ualg import UMinusElt, gram_matrix, serre_element

# ---------------------------------------------------------------------------
# property suites


def _serre_for(X: CartanDatum, tag: str, rep: Report) -> None:
    for i in range(X.rank):
        for j in range(X.rank):
            if i == j:
                continue
            s = serre_element(X, i, j)
            rep.add(f"{tag}: Serre relation (f{X.labels[i]}, f{X.labels[j]}) vanishes", s.is_zero())


def verify_serre_all() -> Report:
    """Serre elements vanish for every preset datum and its folded datum."""
    rep = Report("serre-vanishing")
    for name in PRESET_NAMES:
        pr = preset(name)
        _serre_for(pr.X, f"{name} {pr.X.name}", rep)
        _serre_for(pr.folded, f"{name} folded", rep)
    return rep


def random_element(X: CartanDatum, rng: random.Random, height: int = 3, terms: int = 3) -> UMinusElt:
    out = UMinusElt.zero(X)
    for _ in range(terms):
        parts = []
        for _ in range(rng.randint(1, height)):
            parts.append((rng.randrange(X.rank), rng.randint(1, 2)))
        c = LaurentPoly({rng.randint(-2, 2): rng.choice([-2, -1, 1, 2]), rng.randint(-2, 2): rng.randint(-1, 1)})
        out = out + UMinusElt.word(X, parts, c)
    return out


def verify_involutions(seed: int = 0, samples: int = 8) -> Report:
    """bar and star are involutions, sigma has the order of the automorphism, and the three commute."""
    rng = random.Random(seed)
    rep = Report("involutions")
    for name in ("A2", "F_n1"):
        pr = preset(name)
        X, s = pr.X, pr.sigma
        for t in range(samples):
            x = random_element(X, rng)
            y = random_element(X, rng)
            sx = x
            for _ in range(s.order):
                sx = sx.sigma(s)
            rep.add(f"{name} #{t}: bar(bar(x)) = x", x.bar().bar().equals(x))
            rep.add(f"{name} #{t}: star(star(x)) = x", x.star().star().equals(x))
            rep.add(f"{name} #{t}: sigma^{s.order}(x) = x", sx.equals(x))
            rep.add(f"{name} #{t}: bar(xy) = bar(x) bar(y)", (x * y).bar().equals(x.bar() * y.bar()))
            rep.add(f"{name} #{t}: star(xy) = star(y) star(x)", (x * y).star().equals(y.star() * x.star()))
            rep.add(f"{name} #{t}: bar, star and sigma commute",
                    x.bar().star().equals(x.star().bar()) and x.bar().sigma(s).equals(x.sigma(s).bar())
                    and x.star().sigma(s).equals(x.sigma(s).star()))
    return rep


def verify_gram(height_max: int = 4) -> Report:
    """Gram matrices of canonical bases are nonsingular at every weight up to the height bound."""
    rep = Report("gram-nonsingular")
    X = type_A(2)
    o = pbw.PBWOrder.from_word(X, (0, 1, 0))
    for h in range(1, height_max + 1):
        for a in range(h + 1):
            nu = (a, h - a)
            els = [b.to_uminus() for b in pbw.canonical_basis(nu, o)]
            rep.add(f"A2 Gram matrix at {nu} is nonsingular", is_nonsingular(gram_matrix(els)), f"size {len(els)}")
    ctx = folding.context("F_n1", 2)
    for nu in [(1, 1, 0, 0), (1, 1, 1, 1), (0, 1, 2, 1), (1, 2, 2, 1)]:
        els = [b.to_uminus() for b in pbw.canonical_basis(nu, ctx.order)]
        rep.add(f"A4 Gram matrix at {nu} is nonsingular", is_nonsingular(gram_matrix(els)), f"size {len(els)}")
    return rep


def verify_alternating_F(a_max: int = 8) -> Report:
    rep = Report("alternating-gauss-sums")
    for a in range(1, a_max + 1):
        F = gauss_alternating_F(a)
        rep.add(f"F_{a}(q) = 0", F.is_zero(), str(F))
    return rep


def phi_properties(case: str, n: int | None, seed: int) -> Report:
    return folding.verify_phi_properties(folding.context(case, n), seed=seed)


def j_consistency(case: str, n: int | None, seed: int) -> Report:
    return folding.verify_j_consistency(folding.context(case, n), seed=seed, samples=20)


def affine_suite(case: str, n: int) -> Report:
    rep = Report(f"affine-{case}{n}")
    for r in (affroots.verify_sigma0(case, n), affroots.O_consistency_check(case, n),
              affroots.verify_sigma_partition(case, n)):
        rep.extend(r)
    if not (case == "D" and n == 1):
        M = 8 if case == "D" else 4
        rep.extend(affroots.verify_orbit_bijection(case, n, M))
    return rep


def convex_suite(case: str, n: int, window: int, seed: int) -> Report:
    r = affroots.verify_convex(case, n, window=window, seed=seed)
    out = Report(r.suite, r.checks, r.notes)
    out.data = dict(r.data)
    return out


# ---------------------------------------------------------------------------
# registry

CONVEX_PRESETS = (("A", 2), ("B", 3), ("C", 2), ("D", 2))
AFFINE_CASES = (("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 2), ("C", 3), ("D", 1), ("D", 2), ("D", 3))

Job = tuple[str, Callable[..., Report], dict]


def jobs(target: str, seed: int = 0, window: int = 200) -> list[Job]:
    if target == "rank2":
        return [("rank2-relations", pbw.verify_rank2_relations, {"bound": 3}),
                ("a2-canonical", pbw.verify_a2_canonical, {"height_max": 8}),
                ("rank2-power-congruence", folding.verify_rank2_power_congruence, {"a_max": 3})]
    if target == "serre":
        return [("serre-vanishing", verify_serre_all, {}),
                ("folded-serre", folding.verify_folded_serre, {}),
                ("alternating-gauss-sums", verify_alternating_F, {"a_max": 8})]
    if target == "pbw-images":
        return [("modified-pbw-images", folding.verify_modified_pbw_images, {"height_max": 4}),
                ("braid-identities", folding.verify_braid_identities, {})]
    if target == "affine":
        return [(f"affine-{c}{n}", affine_suite, {"case": c, "n": n}) for c, n in AFFINE_CASES]
    if target == "convex":
        return [(f"convex-{c}{n}", convex_suite, {"case": c, "n": n, "window": window, "seed": seed})
                for c, n in CONVEX_PRESETS]
    if target == "dims":
        return [("dims-A2", folding.verify_dim_identity, {"case": "A2", "height_max": 5}),
                ("dims-A4", folding.verify_dim_identity, {"case": "F_n1", "n": 2, "height_max": 4})]
    if target == "properties":
        return [("involutions", verify_involutions, {"seed": seed}),
                ("gram-nonsingular", verify_gram, {}),
                ("form-preservation", folding.verify_form_preservation, {"height_max": 3}),
                ("phi-A2", phi_properties, {"case": "A2", "n": None, "seed": seed}),
                ("phi-A4", phi_properties, {"case": "F_n1", "n": 2, "seed": seed}),
                ("j-consistency-A2", j_consistency, {"case": "A2", "n": None, "seed": seed}),
                ("j-consistency-A4", j_consistency, {"case": "F_n1", "n": 2, "seed": seed})]
    if target == "all":
        out: list[Job] = []
        for t in TARGETS[:-1]:
            out.extend(jobs(t, seed, window))
        return out
    raise ValueError(f"unknown verification target {target!r}")


TARGETS = ("rank2", "serre", "pbw-images", "affine", "convex", "dims", "properties", "all")


def with_height(js: list[Job], height: int | None) -> list[Job]:
    """Override the height bound of every job that takes one."""
    if height is None:
        return js
    return [(label, fn, {**kw, "height_max": height} if "height_max" in kw else kw) for label, fn, kw in js]


def _run(job: Job) -> Report:
    label, fn, kw = job
    try:
        rep = fn(**kw)
    except Exception as e:  # a crashing suite is a failed suite, with the error as witness
        rep = Report(label)
        rep.add(f"{label} ran to completion", False, f"{type(e).__name__}: {e}")
    rep.suite = label
    return rep


def thread_count() -> int:
    raw = os.environ.get("FOLDQ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run(target: str, seed: int = 0, window: int = 200, workers: int | None = None,
        height: int | None = None) -> list[Report]:
    """Run every job of a target; results come back in registry order."""
    js = with_height(jobs(target, seed, window), height)
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(js) == 1:
        return [_run(j) for j in js]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_run, js))
