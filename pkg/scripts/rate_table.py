#!/usr/bin/env python3
"""Fitted convergence slopes for every operator on the built-in 1-D targets.

usage: python3 scripts/rate_table.py [--norm sup] [--q 1] [--lam 1]
"""

import argparse

from tanhops import ActivationParams, GridSpec, NormKind, OperatorConfig, SweepPlan
from tanhops.convergence import fit_sweep, run_sweep
from tanhops.operators import KINDS

# the Hölder bump is centred at 0.5, so its kink must lie inside the grid
GRIDS = {"holder": GridSpec((0.0,), (1.0,), 101), "holder_m1": GridSpec((0.0,), (1.0,), 101)}
DEFAULT_GRID = GridSpec((-1.0,), (1.0,), 101)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--norm", default="sup")
    ap.add_argument("--q", type=float, default=1.0)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--functions", default="gaussian,trig,exp,holder,holder_m1")
    args = ap.parse_args()

    act = ActivationParams(args.q, args.lam)
    norm = NormKind.parse(args.norm)
    print(f"norm={norm} q={act.q:g} lambda={act.lam:g}")
    print(f"{'function':<12}" + "".join(f"{k:>14}" for k in KINDS))
    for name in args.functions.split(","):
        cells = []
        for kind in KINDS:
            plan = SweepPlan(OperatorConfig(kind, activation=act), name, GRIDS.get(name, DEFAULT_GRID), norm)
            fit = fit_sweep(plan, run_sweep(plan))
            cells.append(f"{fit.slope:8.3f} ({fit.r_squared:.2f})" if fit.ok else "saturated")
        print(f"{name:<12}" + "".join(f"{c:>14}" for c in cells))


if __name__ == "__main__":
    main()
