"""Power revenue: eta(alpha) and the sign of dK/dalpha against the published condition.

    python scripts/power_turning_point.py [--gamma 0.2] [--nu 1e-3]
"""
import argparse

import numpy as np

from vintagecap.config import RunConfig, build
from vintagecap.sensitivity import (
    alpha_hat_power,
    fd_turning_point,
    power_eta,
    unit_coefficients,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma", type=float, default=0.2)
    ap.add_argument("--nu", type=float, default=1e-3)
    ap.add_argument("--nodes", type=int, default=801)
    args = ap.parse_args()
    cfg = RunConfig().with_overrides({
        "cost.q0": 0.0, "revenue.kind": "power", "revenue.b": 1.0,
        "revenue.gamma": args.gamma, "revenue.nu": args.nu, "grid.n_nodes": args.nodes,
    })
    params, rev, cost, grid = build(cfg)
    f, _ = unit_coefficients(params, cost, grid)
    print(f"f = c1/alpha^2 = {f:.6f}")
    for a in (1, 2, 4, 8, 16):
        eta = power_eta(a, params, rev, cost, grid, f=f)
        print(f"alpha={a:3d}  eta={eta:.6g}  alpha*eta={a * eta:.6g}")
    a_hat = alpha_hat_power(params, rev, cost, grid)
    print("published turning condition vanishes at alpha =", a_hat)
    alphas = np.logspace(-3, 3, 61)
    scan = fd_turning_point(cfg, alphas)
    print("finite-difference sign change of dK/dalpha:", scan.change)
    print(f"smallest dK/dalpha over alpha in [1e-3, 1e3] at s = 0, s_bar/2, s_bar: "
          f"{scan.slopes.min(axis=0)}")


if __name__ == "__main__":
    main()
