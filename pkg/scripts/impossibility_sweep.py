"""Tabulate alpha*(delta) and the sign of Delta_1 - Delta_0 under the
adversarial noise schedule on a delta x (eta L) grid.

    python scripts/impossibility_sweep.py --out results/imposs.csv
"""
import argparse
from pathlib import Path

import numpy as np

from curvelab.cli import write_rows
from curvelab.constructions import find_alpha_star, impossibility_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=60)
    ap.add_argument("--out", type=Path, default=Path("results/imposs.csv"))
    args = ap.parse_args()

    deltas = [round(0.1 * k, 1) for k in range(1, 10)]
    etas = np.linspace(0.0, 2.0, args.points + 1)[1:] / args.L
    rows = impossibility_sweep(deltas, etas, L=args.L)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_rows(rows, args.out)

    print(f"{'delta':>6} {'alpha*':>10} {'violated below alpha*':>22} {'S sign agrees':>14}")
    for d in deltas:
        a_star = find_alpha_star(d)
        mine = [r for r in rows if r["delta"] == d]
        below = [r["violated"] for r in mine if r["alpha"] < a_star]
        # S < 0 exactly when Delta_0 < Delta_1, up to rounding near the root
        agree = sum((r["S_alpha"] < 0) == r["violated"] for r in mine
                    if abs(r["S_alpha"]) > 1e-12)
        print(f"{d:6.1f} {a_star:10.6f} {f'{sum(below)}/{len(below)}':>22} "
              f"{f'{agree}/{len(mine)}':>14}")
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
