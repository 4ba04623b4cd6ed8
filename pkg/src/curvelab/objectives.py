"""Objective functions with declared smoothness metadata.

Every objective is an immutable record of a value map, a gradient map and
optional smoothness declarations. The built-in corpus is convex:

* ``quadratic``   -- 0.5 * sum(lam_i * x_i**2) in the eigenbasis of Q
* ``scaled1d``    -- L/2 * x**2
* ``logcosh``     -- log(cosh(x)), curvature in (0, 1]
* ``piecewise1d`` -- convex piecewise quadratic with piecewise-linear gradient

Objectives round-trip through plain dicts (``to_dict`` / ``objective_from_dict``)
so they can be stored in JSON configs and search results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .errors import InvalidSpecError

Vector = np.ndarray


@dataclass(frozen=True)
class HessianBound:
    """Declared majorization  Hess f(x) <= kappa * A  on a sublevel set.

    Only ``lambda_max(A)`` enters any downstream computation, so ``A`` itself
    is represented by its top eigenvalue.
    """

    kappa: float
    majorant_eigmax: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise InvalidSpecError(f"kappa must be positive, got {self.kappa}")
        if not (math.isfinite(self.majorant_eigmax) and self.majorant_eigmax >= 0):
            raise InvalidSpecError(
                f"majorant_eigmax must be nonnegative, got {self.majorant_eigmax}")

    @property
    def L_eff(self) -> float:
        return self.kappa * self.majorant_eigmax


@dataclass(frozen=True)
class QuadraticSpec:
    """Eigenvalues of Q and the starting point expressed in its eigenbasis.

    The eigenbasis is taken to be the standard basis, so ``initial_coords`` is
    directly the starting point x0.
    """

    eigenvalues: tuple
    initial_coords: tuple

    def __post_init__(self):
        lam = tuple(float(v) for v in self.eigenvalues)
        y0 = tuple(float(v) for v in self.initial_coords)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "initial_coords", y0)
        if len(lam) == 0:
            raise InvalidSpecError("quadratic needs at least one eigenvalue")
        if len(lam) != len(y0):
            raise InvalidSpecError(
                f"{len(lam)} eigenvalues but {len(y0)} initial coordinates")
        if not all(math.isfinite(v) and v >= 0 for v in lam):
            raise InvalidSpecError(f"eigenvalues must be finite and >= 0: {lam}")
        if not all(math.isfinite(v) for v in y0):
            raise InvalidSpecError("initial coordinates must be finite")

    @property
    def L(self) -> float:
        return max(self.eigenvalues)

    @property
    def x0(self) -> Vector:
        return np.array(self.initial_coords, dtype=float)


@dataclass(frozen=True)
class PiecewiseQuadratic1D:
    """Convex 1-D function whose derivative is continuous piecewise linear.

    ``slopes[i]`` is the curvature on the i-th interval cut out by
    ``breakpoints`` (so there is one more slope than breakpoint), and
    ``gradient_at_zero_offset`` fixes g(0). The value is anchored at f(0) = 0.
    ``L``, when given, is an upper bound every slope must respect.
    """

    breakpoints: tuple
    slopes: tuple
    gradient_at_zero_offset: float = 0.0
    L: Optional[float] = None

    def __post_init__(self):
        b = tuple(float(v) for v in self.breakpoints)
        m = tuple(float(v) for v in self.slopes)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "slopes", m)
        object.__setattr__(self, "gradient_at_zero_offset",
                           float(self.gradient_at_zero_offset))
        if len(m) != len(b) + 1:
            raise InvalidSpecError(
                f"need len(slopes) == len(breakpoints) + 1, got {len(m)} and {len(b)}")
        if not all(math.isfinite(v) for v in b + m) or not math.isfinite(
                self.gradient_at_zero_offset):
            raise InvalidSpecError("piecewise spec contains non-finite numbers")
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            raise InvalidSpecError(f"breakpoints must be strictly increasing: {b}")
        if any(m2 < m1 for m1, m2 in zip(m, m[1:])):
            raise InvalidSpecError(f"slopes must be nondecreasing: {m}")
        if m[0] < 0:
            raise InvalidSpecError(f"slopes must be nonnegative: {m}")
        if self.L is not None:
            object.__setattr__(self, "L", float(self.L))
            if m[-1] > self.L:
                raise InvalidSpecError(f"slope {m[-1]} exceeds declared L={self.L}")

    @property
    def max_slope(self) -> float:
        return self.slopes[-1]

    def to_dict(self) -> dict:
        d = {"breakpoints": list(self.breakpoints), "slopes": list(self.slopes),
             "gradient_at_zero_offset": self.gradient_at_zero_offset}
        if self.L is not None:
            d["L"] = self.L
        return d


@dataclass(frozen=True)
class Objective:
    dimension: int
    value: Callable[[Vector], float] = field(repr=False)
    gradient: Callable[[Vector], Vector] = field(repr=False)
    smoothness: Optional[float] = None
    hessian_bound: Optional[HessianBound] = None
    description: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return dict(self.description)


def make_quadratic(spec: QuadraticSpec) -> Objective:
    lam = np.array(spec.eigenvalues, dtype=float)

    def value(x):
        return 0.5 * float(np.dot(lam, x * x))

    def gradient(x):
        return lam * x

    return Objective(
        dimension=lam.size, value=value, gradient=gradient, smoothness=spec.L,
        description={"kind": "quadratic", "eigenvalues": list(spec.eigenvalues),
                     "initial_coords": list(spec.initial_coords)},
    )


def make_scaled_quadratic_1d(L: float) -> Objective:
    L = float(L)
    if not (math.isfinite(L) and L > 0):
        raise InvalidSpecError(f"L must be positive, got {L}")

    def value(x):
        return 0.5 * L * x[0] * x[0]

    def gradient(x):
        return np.array([L * x[0]])

    return Objective(dimension=1, value=value, gradient=gradient, smoothness=L,
                     description={"kind": "scaled1d", "L": L})


def make_logcosh_1d() -> Objective:
    log2 = math.log(2.0)

    def value(x):
        a = abs(float(x[0]))
        # log cosh a = a + log(1 + e^{-2a}) - log 2, stable for large a
        return a + math.log1p(math.exp(-2.0 * a)) - log2

    def gradient(x):
        return np.array([math.tanh(float(x[0]))])

    return Objective(dimension=1, value=value, gradient=gradient, smoothness=1.0,
                     hessian_bound=HessianBound(kappa=1.0, majorant_eigmax=1.0),
                     description={"kind": "logcosh"})


def make_piecewise_quadratic_1d(p: PiecewiseQuadratic1D) -> Objective:
    # g(x) = c + m0*x + sum_j dm_j * (x - b_j)_+,  f(x) = int_0^x g
    b = np.array(p.breakpoints, dtype=float)
    dm = np.diff(np.array(p.slopes, dtype=float))
    m0 = p.slopes[0]
    h0 = float(np.dot(dm, np.maximum(-b, 0.0)))
    H0 = 0.5 * float(np.dot(dm, np.maximum(-b, 0.0) ** 2))
    c = p.gradient_at_zero_offset - h0
    has_kinks = b.size > 0

    def value(x):
        t = x[0]
        v = 0.5 * m0 * t * t
        if has_kinks:
            v = v + 0.5 * float(np.dot(dm, np.maximum(t - b, 0.0) ** 2)) - H0
        return v + c * t

    def gradient(x):
        t = x[0]
        g = m0 * t
        if has_kinks:
            g = g + float(np.dot(dm, np.maximum(t - b, 0.0)))
        return np.array([g + c])

    return Objective(dimension=1, value=value, gradient=gradient,
                     smoothness=p.max_slope,
                     description={"kind": "piecewise1d", **p.to_dict()})


def objective_from_dict(d: dict) -> Objective:
    """Build an objective from its JSON description."""
    if not isinstance(d, dict) or "kind" not in d:
        raise InvalidSpecError("objective description needs a 'kind' field")
    kind = d["kind"]
    try:
        if kind == "quadratic":
            lam = d["eigenvalues"]
            y0 = d.get("initial_coords", [0.0] * len(lam))
            return make_quadratic(QuadraticSpec(tuple(lam), tuple(y0)))
        if kind == "scaled1d":
            return make_scaled_quadratic_1d(d["L"])
        if kind == "logcosh":
            return make_logcosh_1d()
        if kind == "piecewise1d":
            return make_piecewise_quadratic_1d(piecewise_from_dict(d))
    except (KeyError, TypeError) as exc:
        raise InvalidSpecError(f"bad {kind!r} objective description: {exc}") from exc
    raise InvalidSpecError(f"unknown objective kind {kind!r}")


def piecewise_from_dict(d: dict) -> PiecewiseQuadratic1D:
    return PiecewiseQuadratic1D(
        breakpoints=tuple(d.get("breakpoints", ())),
        slopes=tuple(d["slopes"]),
        gradient_at_zero_offset=d.get("gradient_at_zero_offset", 0.0),
        L=d.get("L"),
    )


@dataclass
class DeclarationCheck:
    pairs: int
    worst_convexity_gap: float
    worst_lipschitz_ratio: float
    convex_ok: bool
    smooth_ok: bool

    @property
    def ok(self) -> bool:
        return self.convex_ok and self.smooth_ok


def check_declarations(obj: Objective, rng: np.random.Generator, pairs: int = 1000,
                       scale: float = 5.0, slack: float = 1e-9) -> DeclarationCheck:
    """Sample point pairs and test convexity and the declared Lipschitz gradient.

    ``worst_convexity_gap`` is the minimum over pairs of
    f(y) - f(x) - <grad f(x), y - x>, which must not fall below ``-slack``.
    """
    worst_gap = math.inf
    worst_ratio = 0.0
    for _ in range(pairs):
        x = rng.uniform(-scale, scale, obj.dimension)
        y = rng.uniform(-scale, scale, obj.dimension)
        gx = obj.gradient(x)
        gap = obj.value(y) - obj.value(x) - float(np.dot(gx, y - x))
        worst_gap = min(worst_gap, gap)
        dist = float(np.linalg.norm(x - y))
        if dist > 0:
            worst_ratio = max(worst_ratio,
                              float(np.linalg.norm(gx - obj.gradient(y))) / dist)
    smooth_ok = True
    if obj.smoothness is not None:
        smooth_ok = worst_ratio <= obj.smoothness + slack
    return DeclarationCheck(pairs, worst_gap, worst_ratio, worst_gap >= -slack, smooth_ok)


def builtin_objectives(rng: Optional[np.random.Generator] = None) -> list:
    """A small corpus covering every objective kind, for sweeps and property tests."""
    rng = np.random.default_rng(0) if rng is None else rng
    out = [
        make_scaled_quadratic_1d(1.0),
        make_scaled_quadratic_1d(4.0),
        make_quadratic(QuadraticSpec((0.1, 1.0, 2.5), (1.0, -2.0, 0.5))),
        make_logcosh_1d(),
        make_piecewise_quadratic_1d(PiecewiseQuadratic1D((0.0,), (0.0, 1.0))),
        make_piecewise_quadratic_1d(PiecewiseQuadratic1D((-1.0, 1.0), (0.2, 0.5, 1.0), 0.3)),
    ]
    out.append(make_piecewise_quadratic_1d(random_piecewise(rng, L=2.0, max_breakpoints=4)))
    return out


def random_piecewise(rng: np.random.Generator, L: float, max_breakpoints: int,
                     scale: float = 2.0, top_slope_is_L: bool = True) -> PiecewiseQuadratic1D:
    k = int(rng.integers(0, max_breakpoints + 1))
    b = np.sort(rng.uniform(-scale, scale, k))
    m = np.sort(rng.uniform(0.0, L, k + 1))
    if top_slope_is_L:
        m[-1] = L
    return PiecewiseQuadratic1D(tuple(b), tuple(m), float(rng.uniform(-L, L)), L=L)


def sequence_as_vector(x: Any, dimension: int) -> Vector:
    v = np.atleast_1d(np.asarray(x, dtype=float)).copy()
    if v.shape != (dimension,):
        raise InvalidSpecError(f"expected a point of dimension {dimension}, got shape {v.shape}")
    return v
