"""Acceptance criteria, one test per criterion.

Each test prints a single ``CRITERION k: PASS|FAIL`` line; run with ``-s`` to
see them. The per-check detail lines from the verification suites follow.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvelab import verify as V
from curvelab.diagnostics import DEFAULT_TOLERANCE, analyze_curve
from curvelab.iterators import run_gd
from curvelab.objectives import PiecewiseQuadratic1D, make_piecewise_quadratic_1d

RESULTS = {}


@pytest.fixture(scope="module", autouse=True)
def summary():
    yield
    print("\n--- acceptance summary ---")
    for k in sorted(RESULTS):
        print(f"CRITERION {k}: {'PASS' if RESULTS[k] else 'FAIL'}")


def report(k, title, checks):
    ok = all(c.passed for c in checks)
    RESULTS[k] = ok
    print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'}  {title}")
    for c in checks:
        print("    " + c.line())
    return ok


@pytest.fixture(scope="module")
def quad():
    return V.run_suite("quad")


def test_criterion_1_quadratic_oracle(quad):
    checks = [c for c in quad if "closed form" in c.name or "runtime" in c.name]
    assert report(1, "quadratic closed form vs simulation, rel 1e-10, <= 10 s", checks)


def test_criterion_2_quadratic_regime(quad):
    checks = [c for c in quad if "monotone" in c.name or "diverges" in c.name]
    assert report(2, "quadratic curves monotone+convex; 2.5/L diverges", checks)


def test_criterion_3_impossibility_grid():
    assert report(3, "inexact GD: Delta_0 < Delta_1 below alpha*/L, <= 5 s", V.run_suite("imposs"))


def test_criterion_4_two_step_interval():
    assert report(4, "two-step: violation at n=1, jump rel err 1e-12, <= 2 s",
                  V.run_suite("twostep"))


def test_criterion_5_local_threshold():
    assert report(5, "logcosh: sublevel invariance and convexity, <= 2 s", V.run_suite("local"))


piecewise_specs = st.integers(0, 4).flatmap(lambda k: st.tuples(
    st.lists(st.floats(-5, 5), min_size=k, max_size=k, unique=True),
    st.lists(st.floats(0.0, 1.0), min_size=k + 1, max_size=k + 1),
    st.floats(-2, 2),
))

HYPO_FAILS = []


@settings(max_examples=300, deadline=None)
@given(piecewise_specs, st.floats(0.1, 4.0), st.floats(-8, 8), st.floats(0.0, 1.0))
def _property_facts(raw, L, x0, frac):
    bps, slopes, c = raw
    slopes = sorted(s * L for s in slopes)
    spec = PiecewiseQuadratic1D(tuple(sorted(bps)), tuple(slopes), c, L=L)
    obj = make_piecewise_quadratic_1d(spec)
    eta = 2.0 * frac / L
    traj = run_gd(obj, [x0], eta, 60)
    rep = analyze_curve(traj.values, traj.gradnorms, DEFAULT_TOLERANCE)
    if not rep.gradnorm_monotone or (eta <= 1.75 / L and not rep.convex_curve):
        HYPO_FAILS.append((spec, x0, eta))


def test_criterion_6_reference_facts():
    HYPO_FAILS.clear()
    _property_facts()
    checks = V.run_suite("facts") + [V.Check(
        "facts: property-based piecewise quadratics", not HYPO_FAILS,
        f"{len(HYPO_FAILS)} failing examples" if HYPO_FAILS else "300 examples")]
    assert report(6, "exact GD: gradnorms monotone <= 2/L, convex <= 1.75/L", checks)


def test_criterion_7_nogo_structure():
    checks = V.run_suite("nogo", search_samples=100_000)
    assert report(7, "no-go gap: quadratics clean; any witness violates", checks)


def test_criterion_8_lemma_equivalence():
    checks = V.run_suite("lemma")
    assert report(8, "1000 sequences: verdicts agree bit for bit", checks)
