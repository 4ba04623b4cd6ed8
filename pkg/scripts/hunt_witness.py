"""Search for a convex, L-smooth 1-D function whose GD curve is nonconvex at
a stepsize in (1.75/L, 2/L), then replay and print the witness.

    python scripts/hunt_witness.py --seed 0 --samples 100000 --out results/witness.json
"""
import argparse
import json
from pathlib import Path

from curvelab.search import SearchConfig, replay, search_nonconvex_curve, verify_witness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--breakpoints", type=int, default=3)
    ap.add_argument("--refine", type=int, default=200)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    L = args.L
    cfg = SearchConfig(L=L, eta_range=((1.75 + 1e-9) / L, (2.0 - 1e-9) / L),
                       max_breakpoints=args.breakpoints, samples=args.samples,
                       seed=args.seed, refine_rounds=args.refine)
    res = search_nonconvex_curve(cfg)
    print(f"examined {res.candidates_examined} candidates")
    if not res.found:
        print("no witness found")
        return
    w = res.witness
    traj, rep = replay(w)
    gap = verify_witness(w)
    print(f"eta*L      = {w.eta * L!r}")
    print(f"x0         = {w.x0!r}")
    print(f"breakpoints= {list(w.spec.breakpoints)}")
    print(f"slopes     = {list(w.spec.slopes)}")
    print(f"violation at n = {w.index}: Delta = {rep.deltas[w.index]:.6g} -> "
          f"{rep.deltas[w.index + 1]:.6g}")
    print(f"no-go gap  = {gap.gap:.6g} (lhs {gap.lhs:.6g}, rhs {gap.rhs:.6g})")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True))
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
