"""Observed order of the age quadrature against the closed-form kernel profiles.

    python scripts/convergence_study.py
"""
import numpy as np

from vintagecap import closed_forms as cf
from vintagecap.config import RunConfig, build
from vintagecap.equilibrium import lq_profiles
from vintagecap.numerics import AgeGrid


def main():
    params, _, cost, _ = build(RunConfig())
    prev = None
    print(f"{'N':>6} {'ds':>9} {'w1 error':>11} {'w2 error':>11} {'ratio w1':>9} {'ratio w2':>9}")
    for n in (26, 51, 101, 201, 401, 801, 1601, 3201):
        g = AgeGrid(params.s_bar, n)
        w1, w2 = lq_profiles(params, cost, g)
        s = g.nodes
        e1 = np.max(np.abs(w1 - cf.w1_profile(s, 3.0, 0.5, 0.2, 0.1, 10.0)))
        e2 = np.max(np.abs(w2 - cf.w2_profile(s, 5.0, 0.5, 0.2, 0.25)))
        r = ("", "") if prev is None else (f"{prev[0] / e1:9.2f}", f"{prev[1] / e2:9.2f}")
        print(f"{n:6d} {g.ds:9.5f} {e1:11.3e} {e2:11.3e} {r[0]:>9} {r[1]:>9}")
        prev = (e1, e2)


if __name__ == "__main__":
    main()
