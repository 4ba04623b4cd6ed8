"""Executable constructions around GD curve convexity.

* adversarial relative-noise schedule on L/2 x^2 and its sign function S(alpha)
* closed-form forward differences for quadratic GD and the divergence check
* the two-step counterexample configuration
* effective-smoothness threshold and the sublevel-set membership audit
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diagnostics import CurveReport, DEFAULT_TOLERANCE, analyze_curve
from .errors import (DegenerateStartError, InapplicableError, OutOfRegimeError,
                     UnboundedStepsizeError)
from .iterators import NoiseSchedule, Trajectory, TwoStepConfig, run_gd, run_inexact_gd
from .objectives import (HessianBound, Objective, QuadraticSpec, make_quadratic,
                         make_scaled_quadratic_1d)

CONVEX_FACTOR = 1.75

_SCAN_LO, _SCAN_HI, _SCAN_POINTS = 1e-6, 4.0, 4000
_BISECT_WIDTH = 1e-12


class OutOfRegimeWarning(UserWarning):
    """A closed form was evaluated outside the range where its guarantees hold."""


# ---------------------------------------------------------------------------
# adversarial relative noise

def s_function(alpha, delta: float):
    """Sign function of Delta_0 - Delta_1 under the (-delta, +delta) schedule.

    With alpha = eta*L, Delta_0 - Delta_1 = L * x0^2 * alpha * S(alpha).
    Accepts scalars or arrays for ``alpha``.
    """
    # th0*(1 - a*th0/2) - th1*(1 - a*th0)^2*(1 - a*th1/2), th0,1 = 1 -/+ delta,
    # expanded in powers of a so that S(0) = -2*delta holds exactly
    q = 1.0 - delta * delta
    c1 = 2.0 * (1.0 + delta - delta * delta)
    c2 = -2.0 * q
    c3 = 0.5 * q * q
    return -2.0 * delta + alpha * (c1 + alpha * (c2 + alpha * c3))


@functools.lru_cache(maxsize=256)
def find_alpha_star(delta: float) -> float:
    """An alpha* > 0 with S < 0 throughout (0, alpha*).

    Scans a geometric grid for the first sign change, bisects it, then
    re-checks a dense grid below the result and shrinks if a root was skipped.
    Returns the scan's upper end when S stays negative across it.
    """
    if not (0.0 < delta < 1.0):
        raise OutOfRegimeError(f"delta must lie in (0, 1), got {delta}")
    grid = np.concatenate(([0.0], np.geomspace(_SCAN_LO, _SCAN_HI, _SCAN_POINTS)))
    nonneg = np.flatnonzero(s_function(grid, delta) >= 0.0)
    if nonneg.size == 0:
        alpha = float(grid[-1])
    else:
        i = int(nonneg[0])
        lo, up = float(grid[i - 1]), float(grid[i])
        while up - lo > _BISECT_WIDTH:
            mid = 0.5 * (lo + up)
            if s_function(mid, delta) < 0.0:
                lo = mid
            else:
                up = mid
        alpha = lo
    while True:
        check = np.linspace(0.0, alpha, 1001)[1:]
        bad = np.flatnonzero(s_function(check, delta) >= 0.0)
        if bad.size == 0:
            return alpha
        alpha = 0.5 * float(check[bad[0]])


@dataclass(frozen=True)
class ImpossibilityWitness:
    delta: float
    L: float
    alpha_star: float
    alpha_grid: list = field(default_factory=list)

    def recheck(self) -> bool:
        return bool(np.all(s_function(np.array(self.alpha_grid), self.delta) < 0.0))

    def to_dict(self) -> dict:
        return {"delta": self.delta, "L": self.L, "alpha_star": self.alpha_star,
                "alpha_grid": list(self.alpha_grid)}


def impossibility_witness(delta: float, L: float, grid_points: int = 1000) -> ImpossibilityWitness:
    a_star = find_alpha_star(delta)
    grid = np.linspace(0.0, a_star, grid_points + 1)[1:]
    grid = grid[s_function(grid, delta) < 0.0]
    return ImpossibilityWitness(delta, float(L), a_star, grid.tolist())


def adversarial_schedule(delta: float, steps: int) -> NoiseSchedule:
    eps = [0.0] * steps
    eps[0] = -delta
    if steps > 1:
        eps[1] = delta
    return NoiseSchedule(delta, tuple(eps))


def impossibility_experiment(delta: float, L: float, x0: float, eta: float,
                             steps: int = 10,
                             tolerance: Optional[float] = None) -> tuple:
    """Run relative-inexact GD on L/2 x^2 with the (-delta, +delta, 0, ...) schedule.

    Returns ``(trajectory, report)``. For stepsizes below alpha*/L the report
    shows a convexity violation at n = 0. The default tolerance is
    1e-12 * L * x0^2, matching the scale of the curve.
    """
    if x0 == 0:
        raise DegenerateStartError("x0 = 0 is a fixed point; no witness possible")
    if steps < 2:
        raise ValueError("need at least 2 steps to compare Delta_0 and Delta_1")
    a_star = find_alpha_star(delta)
    if not (0 < eta and eta * L <= a_star):
        raise OutOfRegimeError(
            f"eta*L = {eta * L} outside the certified range (0, {a_star}]")
    if tolerance is None:
        tolerance = 1e-12 * L * x0 * x0
    obj = make_scaled_quadratic_1d(L)
    traj = run_inexact_gd(obj, [x0], eta, adversarial_schedule(delta, steps), steps)
    return traj, analyze_curve(traj.values, traj.gradnorms, tolerance)


def impossibility_sweep(deltas, etas, L: float = 1.0, x0: float = 1.0) -> list:
    """Rows (delta, eta, alpha, S_alpha, delta0, delta1, violated) over a grid.

    No regime check: stepsizes past alpha*/L are evaluated too, which is what
    makes the sign change visible.
    """
    obj = make_scaled_quadratic_1d(L)
    rows = []
    for d in deltas:
        for eta in etas:
            traj = run_inexact_gd(obj, [x0], eta, adversarial_schedule(d, 2), 2)
            if traj.diverged:
                d0 = d1 = math.nan
            else:
                d0 = traj.values[0] - traj.values[1]
                d1 = traj.values[1] - traj.values[2]
            alpha = eta * L
            rows.append({"delta": d, "eta": eta, "alpha": alpha,
                         "S_alpha": float(s_function(alpha, d)),
                         "delta0": float(d0), "delta1": float(d1),
                         "violated": bool(d0 < d1)})
    return rows


# ---------------------------------------------------------------------------
# quadratics

def quadratic_in_regime(spec: QuadraticSpec, eta: float) -> bool:
    t = eta * np.array(spec.eigenvalues)
    return bool(np.all((t >= 0.0) & (t <= 2.0)))


def quadratic_delta_closed_form(spec: QuadraticSpec, eta: float, n: int) -> float:
    """Delta_n = 1/2 sum_i gamma_i s_i^n with s_i = (1 - eta*lam_i)^2 and
    gamma_i = eta * lam_i^2 * (2 - eta*lam_i) * y_{0,i}^2.

    Evaluates outside eta*lam_i in [0, 2] as well, with an OutOfRegimeWarning.
    """
    return float(quadratic_deltas_closed_form(spec, eta, np.array([n]), _stacklevel=3)[0])


def quadratic_deltas_closed_form(spec: QuadraticSpec, eta: float, ns, _stacklevel=2) -> np.ndarray:
    """Vectorized :func:`quadratic_delta_closed_form` over an array of indices."""
    if not quadratic_in_regime(spec, eta):
        warnings.warn(f"eta={eta} puts some eta*lambda_i outside [0, 2]",
                      OutOfRegimeWarning, stacklevel=_stacklevel)
    lam = np.array(spec.eigenvalues)
    y = np.array(spec.initial_coords)
    t = eta * lam
    gamma = eta * lam * lam * (2.0 - t) * y * y
    s = (1.0 - t) ** 2
    ns = np.asarray(ns)
    return 0.5 * np.sum(gamma[None, :] * s[None, :] ** ns[:, None], axis=1)


def quadratic_divergence_check(spec: QuadraticSpec, eta: float, steps: int = 100) -> bool:
    """Whether GD values blow up geometrically for eta beyond 2/L.

    True when the run overflows, or when the values end above f(x0) with the
    last step-to-step ratios above 1.
    """
    lam = np.array(spec.eigenvalues)
    y = np.array(spec.initial_coords)
    if not eta * spec.L > 2.0:
        raise OutOfRegimeError(f"eta={eta} is not beyond 2/L = {2.0 / spec.L}")
    unstable = eta * lam > 2.0
    if not np.any(unstable & (y != 0.0)):
        raise InapplicableError("no unstable mode is excited by the initial point")
    traj = run_gd(make_quadratic(spec), spec.x0, eta, steps)
    if traj.diverged:
        return True
    v = traj.values
    if len(v) < 4 or not v[-1] > v[0]:
        return False
    ratios = v[-3:] / v[-4:-1]
    return bool(np.all(ratios > 1.0))


# ---------------------------------------------------------------------------
# two-step scheme

def twostep_counterexample_config(L: float, eta: float, x0) -> TwoStepConfig:
    """theta = 1/L - eta and x_{-1} = x0, for eta in [2/(3L), 1/L)."""
    if not (2.0 / (3.0 * L) <= eta < 1.0 / L):
        raise OutOfRegimeError(
            f"eta={eta} outside [2/(3L), 1/L) = [{2.0 / (3.0 * L)}, {1.0 / L})")
    return TwoStepConfig(eta=eta, theta=1.0 / L - eta, x_minus1=x0)


def twostep_predicted_jump(L: float, eta: float, x1: float) -> float:
    """Delta_2 - Delta_1 = L/2 * t(2 - t) * x1^2 with t = eta*L."""
    t = eta * L
    return 0.5 * L * t * (2.0 - t) * x1 * x1


# ---------------------------------------------------------------------------
# sublevel-set smoothness

def effective_threshold(hb: HessianBound) -> float:
    if hb.L_eff == 0:
        raise UnboundedStepsizeError("L_eff = 0: f is affine on S, any stepsize works")
    return CONVEX_FACTOR / hb.L_eff


@dataclass(frozen=True)
class AuditReport:
    eta: float
    L_eff: float
    threshold: float
    f0: float
    in_sublevel: bool
    violating_indices: list
    max_excess: float
    curve: CurveReport
    trajectory: Trajectory = field(repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.in_sublevel

    def to_dict(self) -> dict:
        return {"eta": self.eta, "L_eff": self.L_eff, "threshold": self.threshold,
                "f0": self.f0, "in_sublevel": self.in_sublevel,
                "violating_indices": list(self.violating_indices),
                "max_excess": self.max_excess, "curve": self.curve.to_dict()}


def sublevel_invariance_audit(obj: Objective, x0, eta: float, steps: int = 200,
                              tolerance: float = DEFAULT_TOLERANCE) -> AuditReport:
    """Run GD and check every iterate stays in {x : f(x) <= f(x0)}."""
    hb = obj.hessian_bound
    if hb is None:
        raise InapplicableError("objective declares no Hessian bound")
    L_eff = hb.L_eff
    if L_eff > 0 and not eta < 2.0 / L_eff:
        raise OutOfRegimeError(f"eta={eta} not below 2/L_eff = {2.0 / L_eff}")
    threshold = math.inf if L_eff == 0 else CONVEX_FACTOR / L_eff
    traj = run_gd(obj, x0, eta, steps)
    f0 = float(traj.values[0])
    excess = traj.values - f0
    bad = np.flatnonzero(excess > tolerance).tolist()
    ok = not bad and not traj.diverged
    return AuditReport(
        eta=eta, L_eff=L_eff, threshold=threshold, f0=f0, in_sublevel=ok,
        violating_indices=bad, max_excess=float(excess.max()),
        curve=analyze_curve(traj.values, traj.gradnorms, tolerance), trajectory=traj)
