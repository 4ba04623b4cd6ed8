"""Verification suites: each one exercises a single convexity result end to end
and returns a list of named pass/fail checks.

Suites: quad, imposs, twostep, local, nogo, facts, lemma. ``run_suite("all")``
runs them in that order.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import constructions as C
from .diagnostics import DEFAULT_TOLERANCE, analyze_curve, forward_differences, nogo_gap
from .iterators import run_gd, run_two_step
from .objectives import (QuadraticSpec, builtin_objectives, make_logcosh_1d, make_quadratic,
                         make_scaled_quadratic_1d)
from .search import SearchConfig, search_nonconvex_curve, verify_witness


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<62} {self.detail}"


def _timed(budget: float, name: str, fn: Callable[[], List[Check]]) -> List[Check]:
    t0 = time.perf_counter()
    checks = fn()
    dt = time.perf_counter() - t0
    return checks + [Check(f"{name}: runtime <= {budget:g}s", dt <= budget, f"{dt:.2f}s")]


# ---------------------------------------------------------------------------

def random_quadratic_grid(seed: int = 0, n_specs: int = 100, n_etas: int = 20,
                          L: float = 1.0):
    """(spec, eta) pairs with d <= 8, eigenvalues in [0, L], y0 in [-10, 10]
    and eta * lambda_i in [0, 2]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_specs):
        d = int(rng.integers(1, 9))
        lam = rng.uniform(0.0, L, d)
        y0 = rng.uniform(-10.0, 10.0, d)
        spec = QuadraticSpec(tuple(lam), tuple(y0))
        etas = rng.uniform(0.0, 1.0, n_etas) * 2.0 / spec.L
        out.append((spec, etas))
    return out


def quad_checks(seed: int = 0, steps: int = 201) -> List[Check]:
    rel_tol, abs_floor = 1e-10, 1e-14
    worst = 0.0
    mismatches = 0
    bad_verdicts = 0
    runs = 0
    grid = random_quadratic_grid(seed)
    ns = np.arange(steps)
    for spec, etas in grid:
        obj = make_quadratic(spec)
        for eta in etas:
            traj = run_gd(obj, spec.x0, float(eta), steps)
            sim = forward_differences(traj.values)
            cf = C.quadratic_deltas_closed_form(spec, float(eta), ns)
            err = np.abs(sim - cf)
            allowed = np.maximum(rel_tol * np.abs(cf), abs_floor)
            mismatches += int(np.sum(err > allowed))
            worst = max(worst, float(np.max(err / allowed)))
            rep = analyze_curve(traj.values, traj.gradnorms, DEFAULT_TOLERANCE)
            bad_verdicts += not (rep.monotone_values and rep.convex_curve)
            runs += 1
    checks = [
        Check("quad: closed form == simulation (n<=200)", mismatches == 0,
              f"{runs} runs, worst err/allowed = {worst:.3g}"),
        Check("quad: monotone and convex curves", bad_verdicts == 0,
              f"{bad_verdicts} failing of {runs}"),
    ]
    spec = grid[0][0]
    top = int(np.argmax(spec.eigenvalues))
    y0 = list(spec.initial_coords)
    y0[top] = y0[top] or 1.0
    spec = QuadraticSpec(spec.eigenvalues, tuple(y0))
    diverges = C.quadratic_divergence_check(spec, 2.5 / spec.L, steps=100)
    checks.append(Check("quad: eta = 2.5/L diverges", diverges, f"L = {spec.L:.4g}"))
    return checks


def imposs_checks() -> List[Check]:
    deltas = [round(0.1 * k, 1) for k in range(1, 10)]
    failures = []
    runs = 0
    min_margin = np.inf
    for delta in deltas:
        a_star = C.find_alpha_star(delta)
        for L in (0.5, 1.0, 4.0):
            x0 = 1.0
            for j in range(1, 11):
                eta = a_star / L * j / 11.0
                traj, rep = C.impossibility_experiment(delta, L, x0, eta, steps=4)
                d0, d1 = rep.deltas[0], rep.deltas[1]
                margin = (d1 - d0) / (L * x0 * x0)
                min_margin = min(min_margin, margin)
                runs += 1
                if not (margin > 1e-12 and rep.first_convexity_violation == 0):
                    failures.append((delta, L, eta))
    exact = [delta for delta in deltas if C.s_function(0.0, delta) != -2.0 * delta]
    return [
        Check("imposs: Delta_0 < Delta_1 on the grid", not failures,
              f"{runs} runs, min margin/(L x0^2) = {min_margin:.3g}"),
        Check("imposs: S(0) == -2 delta exactly", not exact, f"mismatch at {exact}" if exact else ""),
    ]


def twostep_checks() -> List[Check]:
    wrong_index = 0
    worst_rel = 0.0
    runs = 0
    for L in (0.5, 1.0, 4.0):
        obj = make_scaled_quadratic_1d(L)
        for eta in np.linspace(2.0 / (3.0 * L), 1.0 / L - 1e-6, 20):
            for x0 in (1.0, -3.0, 0.01):
                cfg = C.twostep_counterexample_config(L, float(eta), [x0])
                traj = run_two_step(obj, [x0], cfg, 6)
                # Delta_1 vanishes exactly in theory; zero tolerance keeps the
                # tiny-x0 runs, where Delta_2 ~ 1e-17, visible
                rep = analyze_curve(traj.values, traj.gradnorms, 0.0)
                wrong_index += rep.first_convexity_violation != 1
                jump = rep.deltas[2] - rep.deltas[1]
                pred = C.twostep_predicted_jump(L, float(eta), float(traj.points[1][0]))
                worst_rel = max(worst_rel, abs(jump - pred) / abs(pred))
                runs += 1
    return [
        Check("twostep: first violation at n = 1", wrong_index == 0,
              f"{wrong_index} wrong of {runs}"),
        Check("twostep: jump matches L/2 t(2-t) x1^2", worst_rel <= 1e-12,
              f"worst rel err {worst_rel:.3g}"),
    ]


def local_checks() -> List[Check]:
    obj = make_logcosh_1d()
    failures = []
    for x0 in (0.5, 2.0, 10.0):
        for eta in (0.5, 1.0, 1.75):
            rep = C.sublevel_invariance_audit(obj, [x0], eta, steps=200)
            if not (rep.passed and rep.curve.convex_curve):
                failures.append((x0, eta))
    membership = [C.sublevel_invariance_audit(obj, [x0], 1.99, steps=200).passed
                  for x0 in (0.5, 2.0, 10.0)]
    return [
        Check("local: invariant + convex for eta <= 1.75/L_eff", not failures,
              f"failures {failures}" if failures else "9 runs"),
        Check("local: invariant at eta = 1.99", all(membership), "3 runs"),
    ]


def nogo_checks(seed: int = 0, search_samples: int = 100_000) -> List[Check]:
    violated = 0
    evaluated = 0
    for spec, etas in random_quadratic_grid(seed + 1, n_specs=20, n_etas=5):
        obj = make_quadratic(spec)
        for eta in etas:
            if eta <= 0:
                continue
            traj = run_gd(obj, spec.x0, float(eta), 40)
            for n in range(len(traj) - 2):
                violated += nogo_gap(traj, spec.L, n).violated
                evaluated += 1
    checks = [Check("nogo: quadratic GD never violates", violated == 0,
                    f"{evaluated} indices, {violated} violated")]
    cfg = SearchConfig(L=1.0, eta_range=(1.75 + 1e-9, 2.0 - 1e-9), samples=search_samples,
                       seed=seed, refine_rounds=200)
    res = search_nonconvex_curve(cfg)
    if res.found:
        w = res.witness
        rep = verify_witness(w)
        checks.append(Check("nogo: search witness violates the inequality",
                            rep.violated and 1.75 / w.L < w.eta < 2.0 / w.L,
                            f"eta*L = {w.eta * w.L:.6f}, n = {w.index}, gap = {rep.gap:.3g}"))
    else:
        checks.append(Check("nogo: search witness violates the inequality", True,
                            f"not found after {res.candidates_examined} samples"))
    return checks


def facts_checks(seed: int = 0) -> List[Check]:
    rng = np.random.default_rng(seed)
    gn_fail = []
    cvx_fail = []
    runs = 0
    for k, obj in enumerate(builtin_objectives(np.random.default_rng(seed))):
        L = obj.smoothness
        for frac in (0.1, 0.5, 1.0, 1.5, 1.75, 1.9, 2.0):
            eta = frac / L
            for _ in range(5):
                x0 = rng.uniform(-5.0, 5.0, obj.dimension)
                traj = run_gd(obj, x0, eta, 200)
                rep = analyze_curve(traj.values, traj.gradnorms, DEFAULT_TOLERANCE)
                runs += 1
                if not rep.gradnorm_monotone:
                    gn_fail.append((k, frac))
                if frac <= 1.75 and not rep.convex_curve:
                    cvx_fail.append((k, frac))
    return [
        Check("facts: gradnorms nonincreasing for eta <= 2/L", not gn_fail,
              f"{runs} runs" if not gn_fail else f"failures {gn_fail[:5]}"),
        Check("facts: convex curve for eta <= 1.75/L", not cvx_fail,
              f"{runs} runs" if not cvx_fail else f"failures {cvx_fail[:5]}"),
    ]


def second_difference_verdict(a, tolerance: float) -> bool:
    a = np.asarray(a, dtype=float)
    return bool(np.all(a[2:] - 2.0 * a[1:-1] + a[:-2] >= -tolerance))


def random_sequences(rng: np.random.Generator, count: int):
    for i in range(count):
        n = int(rng.integers(3, 40))
        kind = i % 3
        if kind == 0:
            yield rng.normal(size=n)
        elif kind == 1:
            # convex by construction, optionally with a small dent
            inc = np.sort(rng.normal(size=n - 1))
            a = np.concatenate(([0.0], np.cumsum(inc)))
            if rng.uniform() < 0.5:
                a[int(rng.integers(1, n - 1))] += rng.choice([-1, 1]) * 10.0 ** rng.uniform(-12, -6)
            yield a
        else:
            yield np.exp(-rng.uniform(0.01, 2.0) * np.arange(n)) + rng.normal(scale=1e-9, size=n)


def lemma_checks(seed: int = 0, count: int = 1000) -> List[Check]:
    rng = np.random.default_rng(seed)
    disagreements = 0
    convex_seen = 0
    for a in random_sequences(rng, count):
        direct = second_difference_verdict(a, DEFAULT_TOLERANCE)
        verdict = analyze_curve(a, tolerance=DEFAULT_TOLERANCE).convex_curve
        disagreements += direct != verdict
        convex_seen += direct
    return [Check("lemma: forward-difference verdict == second-difference verdict",
                  disagreements == 0,
                  f"{count} sequences ({convex_seen} convex), {disagreements} disagree")]


SUITES: Dict[str, Callable[..., List[Check]]] = {
    "quad": lambda seed=0, **kw: _timed(10.0, "quad", lambda: quad_checks(seed)),
    "imposs": lambda seed=0, **kw: _timed(5.0, "imposs", imposs_checks),
    "twostep": lambda seed=0, **kw: _timed(2.0, "twostep", twostep_checks),
    "local": lambda seed=0, **kw: _timed(2.0, "local", local_checks),
    "nogo": lambda seed=0, search_samples=100_000, **kw: nogo_checks(seed, search_samples),
    "facts": lambda seed=0, **kw: facts_checks(seed),
    "lemma": lambda seed=0, **kw: lemma_checks(seed),
}


def run_suite(name: str, **kwargs) -> List[Check]:
    if name == "all":
        return [c for suite in SUITES.values() for c in suite(**kwargs)]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](**kwargs)
