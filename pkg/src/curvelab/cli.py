"""Command-line front end.

    curvelab run     --config run.json    --out DIR
    curvelab verify  {quad,imposs,twostep,local,nogo,facts,lemma,all}
    curvelab sweep   --config sweep.json  --out DIR
    curvelab search  --config search.json --out DIR [--seed N] [--replay]
    curvelab replay  --config search_result.json

Exit codes: 0 success, 1 failed check or replay, 2 usage or config error.
A nonconvex curve is a result, not an error.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import verify as V
from .diagnostics import DEFAULT_TOLERANCE, analyze_curve, threshold_report
from .errors import CurveLabError
from .iterators import (NoiseSchedule, Trajectory, TwoStepConfig, fmt, run_gd, run_inexact_gd,
                        run_two_step)
from .objectives import Objective, make_scaled_quadratic_1d, objective_from_dict
from .search import (SearchConfig, SearchResult, Witness, replay, search_nonconvex_curve,
                     verify_witness)

log = logging.getLogger("curvelab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    pass


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    return data


def _clean(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(data, path: Path) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# run

_SCHEME_FIELDS = {"gd": set(), "inexact": {"delta", "epsilons"},
                  "twostep": {"theta", "x_minus1"}}


@dataclass
class RunConfig:
    objective: dict
    scheme: str
    x0: list
    eta: float
    steps: int
    extra: dict = field(default_factory=dict)
    trajectory_csv: str = "trajectory.csv"
    report_json: str = "report.json"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        missing = {"objective", "scheme", "x0", "eta", "steps"} - set(d)
        if missing:
            raise ConfigError(f"run config missing {sorted(missing)}")
        scheme = d["scheme"]
        if scheme not in _SCHEME_FIELDS:
            raise ConfigError(f"unknown scheme {scheme!r}")
        present = {k for k in ("delta", "epsilons", "theta", "x_minus1") if k in d}
        if present != _SCHEME_FIELDS[scheme]:
            raise ConfigError(
                f"scheme {scheme!r} needs fields {sorted(_SCHEME_FIELDS[scheme])}, "
                f"got {sorted(present)}")
        return cls(d["objective"], scheme, list(np.atleast_1d(d["x0"])), float(d["eta"]),
                   int(d["steps"]), {k: d[k] for k in present},
                   d.get("trajectory_csv", "trajectory.csv"),
                   d.get("report_json", "report.json"))


def simulate(obj: Objective, scheme: str, x0, eta: float, steps: int, extra: dict) -> Trajectory:
    if scheme == "gd":
        return run_gd(obj, x0, eta, steps)
    if scheme == "inexact":
        return run_inexact_gd(obj, x0, eta, NoiseSchedule(extra["delta"], tuple(extra["epsilons"])),
                              steps)
    return run_two_step(obj, x0, TwoStepConfig(eta, extra["theta"], extra["x_minus1"]), steps)


def curve_summary(traj: Trajectory, tolerance: float) -> dict:
    if len(traj) >= 2:
        out = analyze_curve(traj.values, traj.gradnorms, tolerance).to_dict()
    else:
        out = {}
    out["diverged_at"] = traj.diverged_at
    return out


def cmd_run(args) -> int:
    cfg = RunConfig.from_dict(_load_json(args.config))
    obj = objective_from_dict(cfg.objective)
    traj = simulate(obj, cfg.scheme, cfg.x0, cfg.eta, cfg.steps, cfg.extra)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out / cfg.trajectory_csv)
    report = curve_summary(traj, args.tolerance)
    report.update({"scheme": cfg.scheme, "eta": cfg.eta, "steps": cfg.steps})
    if obj.smoothness and cfg.scheme == "gd":
        report["regime"] = threshold_report(obj.smoothness, cfg.eta)
    _dump_json(report, out / cfg.report_json)
    verdict = "diverged" if traj.diverged else (
        "convex" if report.get("convex_curve") else "nonconvex")
    print(f"{cfg.scheme}: {len(traj)} iterates, curve {verdict}; wrote {out / cfg.trajectory_csv}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in V.SUITES:
        print(f"unknown suite {args.suite!r}; choose from {sorted(V.SUITES)} or all",
              file=sys.stderr)
        return EXIT_USAGE
    checks = V.run_suite(args.suite, seed=args.seed, search_samples=args.search_samples)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# sweep

_SECOND_AXES = ("delta", "theta", "L")


def _axis(spec) -> List[float]:
    if isinstance(spec, dict):
        try:
            return np.linspace(spec["start"], spec["stop"], int(spec["num"])).tolist()
        except KeyError as exc:
            raise ConfigError(f"range axis needs start/stop/num: missing {exc}") from exc
    return [float(v) for v in np.atleast_1d(spec)]


def sweep_rows(d: dict, tolerance: float) -> List[dict]:
    grid = d.get("grid")
    if not isinstance(grid, dict) or "eta" not in grid:
        raise ConfigError("sweep config needs grid.eta")
    others = [k for k in grid if k != "eta"]
    if len(others) > 1 or (others and others[0] not in _SECOND_AXES):
        raise ConfigError(f"grid may cross eta with one of {_SECOND_AXES}, got {others}")
    second = others[0] if others else None
    etas = _axis(grid["eta"])
    seconds = _axis(grid[second]) if second else [None]
    if not etas or not seconds:
        raise ConfigError("empty grid")
    scheme = d.get("scheme", "gd")
    if scheme not in _SCHEME_FIELDS:
        raise ConfigError(f"unknown scheme {scheme!r}")
    steps = int(d.get("steps", 50))
    x0 = list(np.atleast_1d(d.get("x0", 1.0)))
    base = d.get("objective", {"kind": "scaled1d", "L": 1.0})
    if second == "L" and base.get("kind") != "scaled1d":
        raise ConfigError("an L axis requires a scaled1d objective")
    if second == "delta" and scheme != "inexact" or second == "theta" and scheme != "twostep":
        raise ConfigError(f"axis {second!r} does not apply to scheme {scheme!r}")
    pattern = [float(e) for e in d.get("epsilon_pattern", [-1.0, 1.0])]

    rows = []
    for idx, (eta, p) in enumerate(itertools.product(etas, seconds)):
        obj = make_scaled_quadratic_1d(p) if second == "L" else objective_from_dict(base)
        extra = {}
        if scheme == "inexact":
            delta = p if second == "delta" else float(d["delta"])
            eps = [e * delta for e in pattern[:steps]] + [0.0] * max(0, steps - len(pattern))
            extra = {"delta": delta, "epsilons": eps}
        elif scheme == "twostep":
            theta = p if second == "theta" else float(d["theta"])
            extra = {"theta": theta, "x_minus1": d.get("x_minus1", x0)}
        traj = simulate(obj, scheme, x0, eta, steps, extra)
        s = curve_summary(traj, tolerance)
        deltas = s.get("deltas", [])
        sd = s.get("second_diffs", [])
        row = {"index": idx, "eta": eta}
        if second:
            row[second] = p
        row.update({
            "regime": threshold_report(obj.smoothness, eta)
            if obj.smoothness and scheme == "gd" else "",
            "diverged": traj.diverged,
            "monotone_values": s.get("monotone_values"),
            "convex_curve": s.get("convex_curve"),
            "first_convexity_violation": s.get("first_convexity_violation"),
            "gradnorm_monotone": s.get("gradnorm_monotone"),
            "delta0": deltas[0] if len(deltas) > 0 else math.nan,
            "delta1": deltas[1] if len(deltas) > 1 else math.nan,
            "min_second_diff": min(sd) if sd else math.nan,
        })
        rows.append(row)
    return rows


def write_rows(rows: List[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: fmt(v) if isinstance(v, float) else ("" if v is None else v)
                        for k, v in r.items()})


def cmd_sweep(args) -> int:
    d = _load_json(args.config)
    rows = sweep_rows(d, args.tolerance)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / d.get("output", "sweep.csv")
    write_rows(rows, path)
    nonconvex = sum(r["convex_curve"] is False for r in rows)
    print(f"{len(rows)} grid points, {nonconvex} nonconvex; wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# search / replay

def _replay_witness(w: Witness) -> bool:
    _, rep = replay(w)
    ok = rep.first_convexity_violation == w.index
    nogo = verify_witness(w)
    print(f"replay: violation at n = {rep.first_convexity_violation} "
          f"(recorded {w.index}), nogo gap {nogo.gap:.6g}, violated={nogo.violated}")
    return ok and nogo.violated


def cmd_search(args) -> int:
    d = _load_json(args.config)
    name = d.pop("output", "search_result.json")
    if args.seed is not None:
        d["seed"] = args.seed
    if args.tolerance is not None:
        d["tolerance"] = args.tolerance
    try:
        cfg = SearchConfig.from_dict(d)
    except TypeError as exc:
        raise ConfigError(f"bad search config: {exc}") from exc
    res = search_nonconvex_curve(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    _dump_json(res.to_dict(), path)
    if res.found:
        w = res.witness
        print(f"witness after {res.candidates_examined} candidates: eta*L = {w.eta * w.L:.6f}, "
              f"n = {w.index}, Delta_n - Delta_n+1 = {w.second_diff:.6g}")
    else:
        print(f"no witness in {res.candidates_examined} candidates")
    print(f"wrote {path}")
    if args.replay and res.found:
        return EXIT_OK if _replay_witness(res.witness) else EXIT_FAIL
    return EXIT_OK


def cmd_replay(args) -> int:
    d = _load_json(args.config)
    try:
        if "found" in d:
            res = SearchResult.from_dict(d)
            if not res.found:
                print("search result holds no witness", file=sys.stderr)
                return EXIT_USAGE
            w = res.witness
        else:
            w = Witness.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"not a search result or witness: {exc}") from exc
    return EXIT_OK if _replay_witness(w) else EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvelab",
                                description="Optimization-curve convexity experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tolerance_default):
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--tolerance", type=float, default=tolerance_default)

    sp = sub.add_parser("run", help="run one iteration and analyze its curve")
    common(sp, DEFAULT_TOLERANCE)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("suite", help=f"one of {', '.join(V.SUITES)}, all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--search-samples", type=int, default=100_000)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="grid over eta and one more parameter")
    common(sp, DEFAULT_TOLERANCE)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("search", help="hunt for nonconvex curves in (1.75/L, 2/L)")
    common(sp, None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--replay", action="store_true", help="replay a found witness")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("replay", help="re-simulate a stored witness")
    sp.add_argument("--config", required=True, help="search result or witness JSON")
    sp.set_defaults(func=cmd_replay)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ConfigError, CurveLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
