"""Equilibrium capital along a productivity sweep: rise, then fall.

    python scripts/alpha_sweep.py [--from 1] [--to 40] [--steps 40] [--q0 5]
"""
import argparse

import numpy as np

from vintagecap.config import RunConfig, build
from vintagecap.sensitivity import alpha_hat_quadratic, peak_age, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--from", dest="start", type=float, default=1.0)
    ap.add_argument("--to", dest="stop", type=float, default=40.0)
    ap.add_argument("--steps", type=int, default=40)
    ap.add_argument("--q0", type=float, default=5.0)
    args = ap.parse_args()

    cfg = RunConfig().with_overrides({"cost.q0": args.q0})
    params, rev, cost, grid = build(cfg)
    values = np.linspace(args.start, args.stop, args.steps)
    res = sweep("alpha", values, cfg, workers=4)
    print(f"{'alpha':>8} {'eta':>10} {'Q*':>12} {'K(0)':>9} {'K(s_bar)':>9} {'peak age':>9}")
    for a, sol in zip(values, res.solutions):
        info = peak_age(sol.K_bar, grid)
        print(f"{a:8.3f} {sol.eta:10.5f} {sol.Q_star:12.3f} {sol.K_bar[0]:9.4f} "
              f"{sol.K_bar[-1]:9.4f} {info.age:9.3f}")
    k_end = np.array([s.K_bar[-1] for s in res.solutions])
    print(f"K(s_bar) is largest at alpha = {values[np.argmax(k_end)]:.3f}")
    print(f"turning point, published formula: "
          f"{alpha_hat_quadratic(params, rev, cost, grid, printed=True):.4f}")
    print(f"turning point, derived from eta:  "
          f"{alpha_hat_quadratic(params, rev, cost, grid, printed=False):.4f}")


if __name__ == "__main__":
    import warnings

    warnings.simplefilter("ignore")  # regime warnings when q0 != 0 are expected here
    main()
