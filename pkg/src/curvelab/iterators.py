"""Constant-stepsize iterations: exact GD, relative-inexact GD and the
gradient-difference two-step scheme.

All runners return a :class:`Trajectory`. Non-finite values do not raise:
the trajectory is cut at the last finite iterate and ``diverged_at`` records
the index of the first bad one.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidScheduleError, InvalidSpecError
from .objectives import Objective, sequence_as_vector


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Trajectory:
    points: np.ndarray
    values: np.ndarray
    gradnorms: np.ndarray
    stepsize: float
    scheme_tag: str
    diverged_at: Optional[int] = None

    def __post_init__(self):
        n = len(self.points)
        if len(self.values) != n or len(self.gradnorms) != n:
            raise ValueError("points, values and gradnorms must have equal length")
        for arr in (self.points, self.values, self.gradnorms):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.values)

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def to_csv(self, path=None) -> str:
        """Write ``n,value,gradnorm,x_0..x_{d-1}`` rows; returns the text too."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value", "gradnorm"] + [f"x_{i}" for i in range(self.dimension)])
        for n, (x, v, g) in enumerate(zip(self.points, self.values, self.gradnorms)):
            w.writerow([n, fmt(v), fmt(g)] + [fmt(c) for c in x])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def read_trajectory_csv(path, stepsize: float = math.nan, scheme_tag: str = "") -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    body = rows[1:]
    values = np.array([float(r[1]) for r in body])
    gradnorms = np.array([float(r[2]) for r in body])
    points = np.array([[float(c) for c in r[3:]] for r in body])
    return Trajectory(points, values, gradnorms, stepsize, scheme_tag)


@dataclass(frozen=True)
class NoiseSchedule:
    """Relative-error multipliers; step n uses the perturbation eps_n * grad f(x_n)."""

    delta: float
    epsilons: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if not (0.0 <= self.delta < 1.0):
            raise InvalidScheduleError(f"delta must lie in [0, 1), got {self.delta}")
        for n, e in enumerate(self.epsilons):
            if not abs(e) <= self.delta:
                raise InvalidScheduleError(
                    f"|epsilon_{n}| = {abs(e)} exceeds delta = {self.delta}")


@dataclass(frozen=True)
class TwoStepConfig:
    eta: float
    theta: float
    x_minus1: tuple

    def __post_init__(self):
        object.__setattr__(self, "x_minus1",
                           tuple(float(c) for c in np.atleast_1d(self.x_minus1)))


def _drive(obj: Objective, x0, steps: int, eta: float, tag: str,
           step: Callable[[int, np.ndarray, np.ndarray], np.ndarray]) -> Trajectory:
    if steps < 1:
        raise InvalidSpecError(f"steps must be >= 1, got {steps}")
    x = sequence_as_vector(x0, obj.dimension)
    points, values, gradnorms = [], [], []
    diverged_at = None
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(steps + 1):
            if not np.all(np.isfinite(x)):
                diverged_at = n
                break
            v = float(obj.value(x))
            g = np.asarray(obj.gradient(x), dtype=float)
            gn = math.sqrt(float(np.dot(g, g)))
            if not (math.isfinite(v) and math.isfinite(gn)):
                diverged_at = n
                break
            points.append(x)
            values.append(v)
            gradnorms.append(gn)
            if n < steps:
                x = step(n, x, g)
    pts = np.array(points) if points else np.empty((0, obj.dimension))
    return Trajectory(pts, np.array(values), np.array(gradnorms), float(eta), tag, diverged_at)


def run_gd(obj: Objective, x0, eta: float, steps: int) -> Trajectory:
    """Exact gradient descent x_{n+1} = x_n - eta * grad f(x_n)."""
    if eta < 0:
        raise InvalidSpecError(f"stepsize must be nonnegative, got {eta}")
    return _drive(obj, x0, steps, eta, "gd", lambda n, x, g: x - eta * g)


def run_inexact_gd(obj: Objective, x0, eta: float, noise: NoiseSchedule,
                   steps: int) -> Trajectory:
    """GD driven by the perturbed gradient (1 + eps_n) * grad f(x_n).

    The schedule is re-validated against its own ``delta`` and must cover every
    step.
    """
    if eta < 0:
        raise InvalidSpecError(f"stepsize must be nonnegative, got {eta}")
    if len(noise.epsilons) < steps:
        raise InvalidScheduleError(
            f"schedule has {len(noise.epsilons)} multipliers, {steps} steps requested")
    eps = noise.epsilons
    if any(not abs(e) <= noise.delta for e in eps[:steps]):
        raise InvalidScheduleError("schedule multiplier exceeds delta")

    def step(n, x, g):
        return x - eta * (g + eps[n] * g)

    return _drive(obj, x0, steps, eta, "inexact", step)


def run_two_step(obj: Objective, x0, cfg: TwoStepConfig, steps: int) -> Trajectory:
    """x_{n+1} = x_n - eta*g_n - theta*(g_n - g_{n-1}), with g_{-1} taken at x_minus1.

    The auxiliary point x_{-1} only feeds the first gradient difference; the
    returned curve starts at x_0.
    """
    x_prev = sequence_as_vector(cfg.x_minus1, obj.dimension)
    g_prev = [np.asarray(obj.gradient(x_prev), dtype=float)]
    eta, theta = cfg.eta, cfg.theta

    # grouped as x - (eta+theta)*g_n + theta*g_{n-1}: when eta+theta = 1/L on a
    # quadratic the leading terms cancel exactly instead of leaving rounding noise
    step_total = eta + theta

    def step(n, x, g):
        nxt = x - step_total * g + theta * g_prev[0]
        g_prev[0] = g
        return nxt

    return _drive(obj, x0, steps, eta, "twostep", step)
