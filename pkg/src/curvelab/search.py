"""Randomized hunt for nonconvex GD curves with stepsizes in (1.75/L, 2/L).

Candidates are convex 1-D piecewise quadratics with curvature in [0, L]. They
are screened in vectorized batches; any hit is then replayed through the
scalar objective / run_gd / analyze_curve path before being reported, so the
screening code never certifies a witness on its own.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .diagnostics import DEFAULT_TOLERANCE, NogoGapReport, analyze_curve, nogo_gap
from .errors import InconsistentWitnessError, InvalidSpecError
from .iterators import run_gd
from .objectives import PiecewiseQuadratic1D, make_piecewise_quadratic_1d, piecewise_from_dict

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    L: float
    eta_range: tuple
    max_breakpoints: int = 3
    samples: int = 10_000
    seed: int = 0
    steps: int = 12
    tolerance: float = DEFAULT_TOLERANCE
    batch_size: int = 4096
    breakpoint_scale: float = 2.0
    x0_scale: float = 3.0
    refine_starts: int = 8
    refine_rounds: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eta_range", tuple(float(e) for e in self.eta_range))
        lo, hi = self.eta_range
        if not self.L > 0:
            raise InvalidSpecError(f"L must be positive, got {self.L}")
        if not (1.75 / self.L < lo <= hi < 2.0 / self.L):
            raise InvalidSpecError(
                f"eta_range {self.eta_range} not strictly inside "
                f"(1.75/L, 2/L) = ({1.75 / self.L}, {2.0 / self.L})")
        if self.max_breakpoints < 0 or self.samples < 1 or self.steps < 2:
            raise InvalidSpecError("need max_breakpoints >= 0, samples >= 1, steps >= 2")
        if self.batch_size < 1:
            raise InvalidSpecError("batch_size must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eta_range"] = list(self.eta_range)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SearchConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise InvalidSpecError(f"unknown search config fields: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class Witness:
    spec: PiecewiseQuadratic1D
    x0: float
    eta: float
    index: int
    second_diff: float
    nogo: NogoGapReport
    L: float
    steps: int
    tolerance: float

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "x0": self.x0, "eta": self.eta,
                "index": self.index, "second_diff": self.second_diff,
                "nogo": self.nogo.to_dict(), "L": self.L, "steps": self.steps,
                "tolerance": self.tolerance}

    @classmethod
    def from_dict(cls, d: dict) -> "Witness":
        return cls(piecewise_from_dict(d["spec"]), float(d["x0"]), float(d["eta"]),
                   int(d["index"]), float(d["second_diff"]),
                   NogoGapReport.from_dict(d["nogo"]), float(d["L"]), int(d["steps"]),
                   float(d["tolerance"]))


@dataclass(frozen=True)
class SearchResult:
    found: bool
    witness: Optional[Witness]
    candidates_examined: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"found": self.found,
                "witness": None if self.witness is None else self.witness.to_dict(),
                "candidates_examined": self.candidates_examined,
                "config": self.config}

    @classmethod
    def from_dict(cls, d: dict) -> "SearchResult":
        w = d.get("witness")
        return cls(bool(d["found"]), None if w is None else Witness.from_dict(w),
                   int(d["candidates_examined"]), d.get("config", {}))


class _Candidates:
    """A batch of piecewise-quadratic GD runs, padded to a common breakpoint count."""

    def __init__(self, b, m, k, g0, x0, eta):
        self.b, self.m, self.k = b, m, k
        self.g0, self.x0, self.eta = g0, x0, eta

    @classmethod
    def sample(cls, rng: np.random.Generator, cfg: SearchConfig, size: int) -> "_Candidates":
        K = cfg.max_breakpoints
        k = rng.integers(0, K + 1, size)
        b = np.sort(rng.uniform(-cfg.breakpoint_scale, cfg.breakpoint_scale, (size, K)), axis=1)
        m = np.sort(rng.uniform(0.0, cfg.L, (size, K + 1)), axis=1)
        m[np.arange(size), k] = cfg.L
        g0 = rng.uniform(-cfg.L * cfg.breakpoint_scale, cfg.L * cfg.breakpoint_scale, size)
        x0 = rng.uniform(-cfg.x0_scale, cfg.x0_scale, size)
        eta = rng.uniform(cfg.eta_range[0], cfg.eta_range[1], size)
        return cls(b, m, k, g0, x0, eta)

    def __len__(self):
        return len(self.x0)

    def curves(self, steps: int) -> np.ndarray:
        K = self.b.shape[1]
        active = np.arange(K)[None, :] < self.k[:, None]
        dm = np.diff(self.m, axis=1) * active
        m0 = self.m[:, 0]
        neg = np.maximum(-self.b, 0.0)
        h0 = (dm * neg).sum(axis=1)
        H0 = 0.5 * (dm * neg ** 2).sum(axis=1)
        c = self.g0 - h0

        def value(x):
            r = np.maximum(x[:, None] - self.b, 0.0)
            return 0.5 * m0 * x * x + 0.5 * (dm * r * r).sum(axis=1) - H0 + c * x

        def grad(x):
            r = np.maximum(x[:, None] - self.b, 0.0)
            return m0 * x + (dm * r).sum(axis=1) + c

        x = self.x0.copy()
        out = np.empty((len(x), steps + 1))
        out[:, 0] = value(x)
        for n in range(steps):
            x = x - self.eta * grad(x)
            out[:, n + 1] = value(x)
        return out

    def spec(self, i: int, L: float) -> PiecewiseQuadratic1D:
        k = int(self.k[i])
        return PiecewiseQuadratic1D(tuple(self.b[i, :k]), tuple(self.m[i, :k + 1]),
                                    float(self.g0[i]), L=L)

    def take(self, idx) -> "_Candidates":
        return _Candidates(self.b[idx], self.m[idx], self.k[idx], self.g0[idx],
                           self.x0[idx], self.eta[idx])


def _jumps(V: np.ndarray) -> np.ndarray:
    # Delta_{n+1} - Delta_n per candidate
    D = V[:, :-1] - V[:, 1:]
    return D[:, 1:] - D[:, :-1]


def _score(V: np.ndarray) -> np.ndarray:
    D0 = np.abs(V[:, 0] - V[:, 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        s = _jumps(V).max(axis=1) / np.maximum(D0, 1e-300)
    return np.nan_to_num(s, nan=-np.inf)


def replay(witness: Witness):
    obj = make_piecewise_quadratic_1d(witness.spec)
    traj = run_gd(obj, [witness.x0], witness.eta, witness.steps)
    return traj, analyze_curve(traj.values, traj.gradnorms, witness.tolerance)


def _confirm(cands: _Candidates, i: int, cfg: SearchConfig) -> Optional[Witness]:
    spec = cands.spec(i, cfg.L)
    x0, eta = float(cands.x0[i]), float(cands.eta[i])
    traj = run_gd(make_piecewise_quadratic_1d(spec), [x0], eta, cfg.steps)
    rep = analyze_curve(traj.values, traj.gradnorms, cfg.tolerance)
    n = rep.first_convexity_violation
    if n is None or traj.diverged:
        return None
    if not rep.gradnorm_monotone:
        log.warning("candidate %d has increasing gradient norms; skipped", i)
        return None
    return Witness(spec, x0, eta, n, rep.second_diffs[n],
                   nogo_gap(traj, cfg.L, n, cfg.tolerance), cfg.L, cfg.steps, cfg.tolerance)


def search_nonconvex_curve(cfg: SearchConfig) -> SearchResult:
    """Return the first confirmed witness, or found=False after the budget.

    Deterministic in ``cfg``: within a batch the lowest candidate index wins.
    """
    rng = np.random.default_rng(cfg.seed)
    examined = 0
    keep = max(cfg.refine_starts, 0)
    best: Optional[_Candidates] = None
    best_scores = np.empty(0)

    while examined < cfg.samples:
        size = min(cfg.batch_size, cfg.samples - examined)
        cands = _Candidates.sample(rng, cfg, size)
        V = _curves_safe(cands, cfg.steps)
        hits = np.flatnonzero((_jumps(V) > cfg.tolerance).any(axis=1))
        for i in hits:
            w = _confirm(cands, int(i), cfg)
            if w is not None:
                return SearchResult(True, w, examined + int(i) + 1, cfg.to_dict())
        examined += size
        if keep and cfg.refine_rounds:
            best, best_scores = _merge_best(best, best_scores, cands, _score(V), keep)

    if best is not None:
        w, used = _refine(best, best_scores, cfg, rng)
        examined += used
        if w is not None:
            return SearchResult(True, w, examined, cfg.to_dict())
    return SearchResult(False, None, examined, cfg.to_dict())


def _curves_safe(cands: _Candidates, steps: int) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        V = cands.curves(steps)
    V[~np.isfinite(V).all(axis=1)] = 0.0
    return V


def _merge_best(best, best_scores, cands, scores, keep):
    if best is None:
        pool, pool_scores = cands, scores
    else:
        pool = _Candidates(*(np.concatenate([getattr(best, a), getattr(cands, a)])
                             for a in ("b", "m", "k", "g0", "x0", "eta")))
        pool_scores = np.concatenate([best_scores, scores])
    order = np.argsort(-pool_scores, kind="stable")[:keep]
    return pool.take(order), pool_scores[order]


def _refine(start: _Candidates, scores: np.ndarray, cfg: SearchConfig, rng):
    """Hill-climb the best near-misses with shrinking random perturbations."""
    cur, cur_scores = start, scores.copy()
    sigma = np.full(len(cur), 0.25)
    lo, hi = cfg.eta_range
    used = 0
    for _ in range(cfg.refine_rounds):
        S = len(cur)
        b = np.sort(cur.b + sigma[:, None] * rng.standard_normal(cur.b.shape), axis=1)
        m = np.sort(np.clip(cur.m + sigma[:, None] * cfg.L * rng.standard_normal(cur.m.shape),
                            0.0, cfg.L), axis=1)
        prop = _Candidates(
            b, m, cur.k,
            cur.g0 + sigma * cfg.L * rng.standard_normal(S),
            cur.x0 + sigma * rng.standard_normal(S),
            np.clip(cur.eta + sigma * (hi - lo) * rng.standard_normal(S), lo, hi))
        V = _curves_safe(prop, cfg.steps)
        used += S
        hits = np.flatnonzero((_jumps(V) > cfg.tolerance).any(axis=1))
        for i in hits:
            if _valid_breakpoints(prop, int(i)):
                w = _confirm(prop, int(i), cfg)
                if w is not None:
                    return w, used
        new_scores = _score(V)
        better = new_scores > cur_scores
        for a in ("b", "m", "g0", "x0", "eta"):
            arr = getattr(cur, a)
            arr[better] = getattr(prop, a)[better]
        cur_scores[better] = new_scores[better]
        sigma = np.where(better, sigma, sigma * 0.9)
    return None, used


def _valid_breakpoints(cands: _Candidates, i: int) -> bool:
    b = cands.b[i, :int(cands.k[i])]
    return bool(np.all(np.diff(b) > 0))


def verify_witness(witness: Witness) -> NogoGapReport:
    """Re-simulate the witness and evaluate the no-go gap at its violation index.

    Raises InconsistentWitnessError if gradient norms increase beyond the
    tolerance, which cannot happen for a convex L-smooth objective at eta < 2/L.
    """
    traj, rep = replay(witness)
    if not rep.gradnorm_monotone:
        raise InconsistentWitnessError(
            "gradient norms increase along the witness trajectory")
    return nogo_gap(traj, witness.L, witness.index, witness.tolerance)
