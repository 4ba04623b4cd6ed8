"""Curve statistics: forward differences, discrete convexity, gradient-norm
monotonicity and the no-go gap."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientDataError, OutOfRegimeError
from .iterators import Trajectory

DEFAULT_TOLERANCE = 1e-10

CONVEX_GUARANTEED = "convex_guaranteed"
GRADNORM_ONLY = "gradnorm_only"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class CurveReport:
    deltas: list
    second_diffs: list
    monotone_values: bool
    convex_curve: bool
    first_convexity_violation: Optional[int]
    gradnorm_monotone: Optional[bool]
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class NogoGapReport:
    index: int
    lhs: float
    rhs: float
    gap: float
    violated: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NogoGapReport":
        return cls(int(d["index"]), float(d["lhs"]), float(d["rhs"]), float(d["gap"]),
                   bool(d["violated"]))


def forward_differences(values: Sequence[float]) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    return a[:-1] - a[1:]


def analyze_curve(values: Sequence[float], gradnorms: Optional[Sequence[float]] = None,
                  tolerance: float = DEFAULT_TOLERANCE) -> CurveReport:
    """Summarize the curve n -> values[n].

    The curve counts as convex when the forward differences are nonincreasing
    up to ``tolerance``; ``gradnorm_monotone`` is None when no gradient norms
    are supplied.
    """
    if tolerance < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tolerance}")
    a = np.asarray(values, dtype=float)
    if a.size < 2:
        raise InsufficientDataError(f"need at least 2 values, got {a.size}")
    deltas = a[:-1] - a[1:]
    second = deltas[:-1] - deltas[1:]
    bad = np.flatnonzero(second < -tolerance)
    first = int(bad[0]) if bad.size else None

    gn_mono = None
    if gradnorms is not None:
        gn = np.asarray(gradnorms, dtype=float)
        gn_mono = bool(np.all(gn[1:] <= gn[:-1] + tolerance))

    return CurveReport(
        deltas=deltas.tolist(),
        second_diffs=second.tolist(),
        monotone_values=bool(np.all(deltas >= -tolerance)),
        convex_curve=first is None,
        first_convexity_violation=first,
        gradnorm_monotone=gn_mono,
        tolerance=float(tolerance),
    )


def nogo_gap(traj: Trajectory, L: float, n: int,
             tolerance: float = DEFAULT_TOLERANCE) -> NogoGapReport:
    """Compare the curve's second difference at n with the future gradient drop.

    lhs = Delta_n - Delta_{n+1}
    rhs = eta * (1 - eta*L/2) * (|g_{n+1}|^2 - |g_{n+2}|^2)
    """
    eta = traj.stepsize
    if not (L > 0):
        raise OutOfRegimeError(f"L must be positive, got {L}")
    if not (0 < eta < 2.0 / L):
        raise OutOfRegimeError(f"stepsize {eta} outside (0, 2/L) = (0, {2.0 / L})")
    if n < 0 or len(traj) < n + 3:
        raise InsufficientDataError(
            f"index {n} needs {n + 3} iterates, trajectory has {len(traj)}")
    v = traj.values
    g = traj.gradnorms
    lhs = float((v[n] - v[n + 1]) - (v[n + 1] - v[n + 2]))
    rhs = float(eta * (1.0 - eta * L / 2.0) * (g[n + 1] ** 2 - g[n + 2] ** 2))
    gap = lhs - rhs
    return NogoGapReport(n, lhs, rhs, gap, gap < -tolerance)


def threshold_report(L: float, eta: float) -> str:
    if eta <= 1.75 / L:
        return CONVEX_GUARANTEED
    if eta <= 2.0 / L:
        return GRADNORM_ONLY
    return UNSTABLE
