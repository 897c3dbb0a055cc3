"""Acceptance suite: one criterion per test, one pass/fail line each.

Every tolerance is pinned here, not configured elsewhere: exact equalities
for the combinatorial identities, 1/(2M) rounding guards for threshold
estimates, and the stated wall-clock budgets.
"""

import time
from fractions import Fraction

import pytest

from arcdet.harness import builtin_corpus, run_campaign

BUDGET = 2**28


def _announce(num, title, ok, elapsed, detail=""):
    line = f"criterion {num:>2} [{'PASS' if ok else 'FAIL'}] {title} ({elapsed:.1f}s)"
    if detail:
        line += f" {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def corpus():
    return builtin_corpus()


def test_criterion_1_stratification_identity(corpus):
    """|Cont^m(Z_A)| equals the sum of its profile strata, exactly, residual zero."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["stratification-generic-2x2"], seed=0, budget=BUDGET)
    ok = not rep.failed
    for r in rep.results:
        ok = ok and r.status == "PASS"
        ok = ok and r.payload["residual"] == 0
        ok = ok and r.payload["cont_m"] == sum(c for _, c in r.payload["strata"])
    elapsed = time.monotonic() - t0
    _announce(1, "stratification identity (generic 2x2, m<=3, q in {2,3})", ok and elapsed < 60, elapsed)


def test_criterion_2_fiber_codimension_formula(corpus):
    """Counted projective fiber codim equals the profile formula; empty iff
    the top part is below m.  Counts here are exact cell counts."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["fiber-formula-grid"], seed=0, budget=BUDGET)
    ok = not rep.failed
    for r in rep.results:
        ok = ok and r.status == "PASS"
        lam = r.payload["lambda"]
        m = r.payload["m"]
        empty_expected = max(lam) < m
        ok = ok and (r.payload["formula"] == "EMPTY") == empty_expected
    elapsed = time.monotonic() - t0
    _announce(2, "fiber codimension formula (r in {2,3}, lam_r<=3, m<=3)", ok and elapsed < 30, elapsed)


def test_criterion_3_lct_known_values(corpus):
    """x1^a -> 1/a exactly; x1*x2 -> 1 exactly; generic determinant -> 1
    within 1/(2M) at M = 4 with consensus at every m."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["lct-known-values"], seed=0, budget=BUDGET)
    by_name = {r.name: r for r in rep.results}
    ok = all(r.status == "PASS" for r in rep.results)

    exact = {"lct-x1": "1", "lct-x1sq": "1/2", "lct-x1cube": "1/3", "lct-x1x2": "1"}
    for name, expect in exact.items():
        est = by_name[name].payload["estimate"]
        ok = ok and Fraction(est) == Fraction(expect)
        ok = ok and by_name[name].payload["certified_upper_bound"]

    det = by_name["lct-det2x2"].payload
    est = Fraction(det["estimate"])
    ok = ok and abs(est - 1) <= Fraction(1, 8)
    ok = ok and all(cell["report"]["status"] in ("CONSENSUS", "EXACT_EMPTY") for cell in det["per_m"])
    elapsed = time.monotonic() - t0
    _announce(3, "lct estimator on known values", ok and elapsed < 120, elapsed)


def test_criterion_4_corollary_consistency(corpus):
    """Square pairs: generic gives (1, 2); diag(x1, x1) gives (1/2, 1) and
    attains the forward transform with equality."""
    t0 = time.monotonic()
    rep_g = run_campaign(corpus["corollary-generic-2x2"], seed=0, budget=BUDGET)
    rep_d = run_campaign(corpus["corollary-diag-x1x1"], seed=0, budget=BUDGET)
    ok = all(r.status == "PASS" for r in rep_g.results + rep_d.results)

    pg = rep_g.results[0].payload
    tol = Fraction(1, 8)
    ok = ok and abs(Fraction(pg["lct_z"]["estimate"]) - 1) <= tol
    ok = ok and abs(Fraction(pg["lct_w"]) - 2) <= tol

    pd = rep_d.results[0].payload
    z = Fraction(pd["lct_z"]["estimate"])
    w = Fraction(pd["lct_w"])
    ok = ok and abs(z - Fraction(1, 2)) <= tol and abs(w - 1) <= tol
    ok = ok and min(2 * z, 1 + z) == w  # transform attained with equality
    elapsed = time.monotonic() - t0
    _announce(4, "corollary consistency (generic and diag pairs)", ok and elapsed < 120, elapsed)


def test_criterion_5_snf_reconstruction(corpus):
    """200 random series matrices at N=6 over F_5: P M Q diagonal, unit
    transforms, profile equal to the minor-order oracle."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["snf-roundtrip-random"], seed=0, budget=BUDGET)
    r = rep.results[0]
    ok = r.status == "PASS" and r.payload["count"] == 200 and not r.payload["failures"]
    elapsed = time.monotonic() - t0
    _announce(5, "SNF reconstruction on 200 random matrices", ok and elapsed < 10, elapsed)


def test_criterion_6_cauchy_binet_oracle(corpus):
    """100 random full-rank integer configurations: det(D diag(x) D^T)
    equals the squared-minor expansion term for term."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["cauchy-binet-random"], seed=0, budget=BUDGET)
    r = rep.results[0]
    ok = r.status == "PASS" and r.payload["count"] == 100 and not r.payload["failures"]
    elapsed = time.monotonic() - t0
    _announce(6, "Cauchy-Binet expansion oracle (100 random)", ok and elapsed < 10, elapsed)


def test_criterion_7_one_genericity_cross_oracle(corpus):
    """Hadamard criterion and bilinear search agree on every full-rank sign
    configuration with r = 2, n <= 4."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["one-generic-grid"], seed=0, budget=BUDGET)
    r = rep.results[0]
    ok = r.status == "PASS" and not r.payload["disagreements"] and r.payload["checked"] > 1000
    elapsed = time.monotonic() - t0
    _announce(7, "1-genericity cross-oracle (r=2, n<=4, sign entries)", ok and elapsed < 60, elapsed)


def test_criterion_8_configuration_campaign(corpus):
    """Triangle graph: square-free determinant, connected matroid, and the
    threshold pair (1, 2) within 1/(2M) at M = 3."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["configuration-triangle"], seed=0, budget=BUDGET)
    r = rep.results[0]
    p = r.payload
    tol = Fraction(1, 6)
    ok = r.status == "PASS"
    ok = ok and p["determinant"] == "x1*x2 + x1*x3 + x2*x3"
    ok = ok and p["square_free"] and p["connected"]
    z = Fraction(p["corollary"]["lct_z"]["estimate"])
    w = Fraction(p["corollary"]["lct_w"])
    ok = ok and abs(z - 1) <= tol and abs(w - 2) <= tol
    elapsed = time.monotonic() - t0
    _announce(8, "configuration campaign (triangle)", ok and elapsed < 120, elapsed)


def test_criterion_9_affine_cone_comparison(corpus):
    """Cone contact against the shifted punctured model for [x1] and the
    generic 2x2, all p <= m <= 3, q in {2, 3}."""
    t0 = time.monotonic()
    rep = run_campaign(corpus["cone-comparison-basic"], seed=0, budget=BUDGET)
    ok = not rep.failed and all(r.status == "PASS" for r in rep.results)
    for r in rep.results:
        if r.payload.get("count_identity_ok") is not None:
            ok = ok and r.payload["count_identity_ok"]
        ok = ok and r.payload["codim_identity_ok"]
    elapsed = time.monotonic() - t0
    _announce(9, "affine cone comparison (p <= m <= 3)", ok and elapsed < 60, elapsed)


def test_criterion_10_determinism(corpus):
    """Repeating a criterion with the same seed gives byte-identical reports."""
    t0 = time.monotonic()
    ok = True
    for name in ("corollary-diag-x1x1", "snf-roundtrip-random", "lct-known-values"):
        a = run_campaign(corpus[name], seed=0, budget=BUDGET)
        b = run_campaign(corpus[name], seed=0, budget=BUDGET)
        ok = ok and a.canonical_json() == b.canonical_json()
    elapsed = time.monotonic() - t0
    _announce(10, "determinism (byte-identical reports per seed)", ok, elapsed)
