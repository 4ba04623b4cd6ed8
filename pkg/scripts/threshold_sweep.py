"""Sweep eta*L across [1, 2] on random convex piecewise quadratics and count
how often the exact-GD curve fails to be convex.

Below 1.75 the count must be zero; between 1.75 and 2 it need not be.

    python scripts/threshold_sweep.py --samples 20000
"""
import argparse
from pathlib import Path

import numpy as np

from curvelab.cli import write_rows
from curvelab.search import SearchConfig, _Candidates, _jumps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tolerance", type=float, default=1e-10)
    ap.add_argument("--out", type=Path, default=Path("results/threshold.csv"))
    args = ap.parse_args()

    cfg = SearchConfig(L=1.0, eta_range=(1.76, 1.99))
    rng = np.random.default_rng(args.seed)
    rows = []
    for etaL in np.round(np.arange(1.0, 2.0001, 0.05), 2):
        c = _Candidates.sample(rng, cfg, args.samples)
        c.eta = np.full(args.samples, float(etaL))
        jumps = _jumps(c.curves(args.steps))
        bad = int(np.sum(np.max(jumps, axis=1) > args.tolerance))
        rows.append({"etaL": float(etaL), "samples": args.samples, "nonconvex": bad,
                     "worst_jump": float(np.max(jumps))})
        print(f"eta*L = {etaL:4.2f}  nonconvex {bad:6d}/{args.samples}  "
              f"worst jump {np.max(jumps):.3e}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_rows(rows, args.out)


if __name__ == "__main__":
    main()
