"""Acceptance criteria 1-12, each at its stated tolerance.

Every test records one PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion still reports what was measured.
"""
import numpy as np
import pytest

from conftest import COSTS, MATRIX, REVENUES, record, sup
from vintagecap import closed_forms as cf
from vintagecap import numerics as nm
from vintagecap.config import RunConfig, build
from vintagecap.dynamics import convergence_probe, mp_residuals
from vintagecap.equilibrium import (
    F_of_eta,
    apply_T,
    closed_form_eta,
    discounted_return,
    lq_coefficients,
    lq_profiles,
    solve_equilibrium,
    solve_equilibrium_fixed_point,
)
from vintagecap.model import Log, ModelParams, Power, PurePower, Quadratic
from vintagecap.sensitivity import (
    alpha_hat_power,
    alpha_hat_quadratic,
    fd_turning_point,
    peak_age,
    power_eta,
    s_star_analytic,
    solve,
    unit_coefficients,
)

BENCH = dict(alpha=3.0, beta0=0.5, mu=0.2, lam=0.1, s_bar=10.0, q0=5.0, w=0.25)
PURE = {"cost.q0": 0.0}
# power revenue for criterion 10: elasticity and shift are not fixed by the
# source; gamma = 0.2 with a small shift keeps the benchmark-style f
POWER = {"revenue.kind": "power", "revenue.b": 1.0, "revenue.gamma": 0.2, "revenue.nu": 1e-3}


def _kernel_errors(n):
    b = BENCH
    params = ModelParams(b["mu"], b["lam"], b["s_bar"], b["alpha"])
    _, _, cost, _ = build(RunConfig())
    g = nm.AgeGrid(b["s_bar"], n)
    s = g.nodes
    ab = discounted_return(params, g)
    w1, w2 = lq_profiles(params, cost, g)
    return (
        sup(ab - cf.alpha_bar_constant(s, b["alpha"], b["mu"], b["lam"], b["s_bar"])),
        sup(w1 - cf.w1_profile(s, b["alpha"], b["beta0"], b["mu"], b["lam"], b["s_bar"])),
        sup(w2 - cf.w2_profile(s, b["q0"], b["beta0"], b["mu"], b["w"])),
    )


def test_criterion_01_kernel_oracle():
    e_ab, e_w1, e_w2 = _kernel_errors(4001)
    within = max(e_ab, e_w1, e_w2) <= 1e-6
    # the refinement ratio is read where the error is still above rounding
    coarse, fine = _kernel_errors(201), _kernel_errors(401)
    ratios = (coarse[1] / fine[1], coarse[2] / fine[2])
    ab_exact = max(coarse[0], fine[0]) <= 1e-12  # exact for constant alpha at any ds
    ok = within and min(ratios) >= 3.5 and ab_exact
    record("1", ok, f"N=4001 sup errors alpha_bar={e_ab:.2e} w1={e_w1:.2e} w2={e_w2:.2e}; "
                    f"halving ds (N 201->401) cuts w1 by {ratios[0]:.2f}, w2 by {ratios[1]:.2f}; "
                    "alpha_bar exact to rounding")
    assert ok


def _matrix_solutions():
    params = ModelParams(0.2, 0.1, 10.0, 3.0)
    grid = nm.AgeGrid(10.0, 2001)
    out = []
    for rev, cost in MATRIX:
        sol = solve_equilibrium(params, REVENUES[rev], COSTS[cost], grid)
        out.append((rev, cost, params, grid, sol))
    return out


def test_criterion_02_scalar_equation():
    worst = max((sol.residuals.theta_at_eta, f"{r}/{c}")
                for r, c, _, _, sol in _matrix_solutions())
    ok = worst[0] <= 1e-12
    record("2", ok, f"max |theta(eta)| over 12 configurations = {worst[0]:.2e} ({worst[1]})")
    assert ok


def test_criterion_03_closed_form_eta():
    b = BENCH
    params = ModelParams(b["mu"], b["lam"], b["s_bar"], b["alpha"])
    _, _, cost, grid = build(RunConfig())
    w1, w2 = lq_profiles(params, cost, grid)
    c1, c2 = lq_coefficients(w1, w2, params, grid)
    k1 = cf.c1_coefficient(b["alpha"], b["beta0"], b["mu"], b["lam"], b["s_bar"])
    k2 = cf.c2_coefficient(b["alpha"], b["q0"], b["beta0"], b["mu"], b["w"], b["s_bar"])
    worst = 0.0
    soft = []
    for rev in (Log(), Power(1.0, 0.5, 1e-3), PurePower(1.0, 0.5), Quadratic(4e-5, 1.0)):
        eta = solve_equilibrium(params, rev, cost, grid).eta
        # quadrature coefficients and the analytic coefficients (k1), (k2)
        worst = max(worst, abs(eta - closed_form_eta(rev, c1, c2)),
                    abs(eta - closed_form_eta(rev, k1, k2)))
        if isinstance(rev, Quadratic):
            worst = max(worst, abs(eta - cf.quadratic_eta(rev.a, rev.b, c1, c2)))
            soft = [abs(eta - cf.printed_eta_sensitivity(rev.a, rev.b, c1, c2)),
                    abs(eta - cf.printed_eta_lemma(rev.a, rev.b, c1, c2))]
    ok = worst <= 1e-10
    record("3", ok, f"max |eta - closed form| = {worst:.2e} (log, power, pure power, quadratic); "
                    f"printed sign variants off by {soft[0]:.3g} and {soft[1]:.3g} (soft)")
    assert ok


def test_criterion_04_operator_cross_check():
    params, rev, cost, grid = build(RunConfig())
    sol = solve_equilibrium(params, rev, cost, grid)
    r_T = sup(apply_T(sol.K_bar, params, rev, cost, grid) - sol.K_bar)
    limit, diag = solve_equilibrium_fixed_point(params, rev, cost, grid, 1e-12, 500)
    gap = sup(limit - F_of_eta(sol.eta, params, cost, grid))
    ok = r_T <= 1e-8 and gap <= 1e-8
    record("4", ok, f"||T K - K|| = {r_T:.2e}; T-iteration limit vs F(eta) = {gap:.2e} "
                    f"({diag.iterations} iterations, contraction {diag.contraction_factor:.3f})")
    assert ok


def test_criterion_05_mp_stationarity():
    worst = (0.0, "")
    for r, c, params, grid, sol in _matrix_solutions():
        res = mp_residuals(sol, params, REVENUES[r], COSTS[c], grid)
        m = max(res.r_T, res.r_zeta, res.r_u0, res.r_u1)
        worst = max(worst, (m, f"{r}/{c}"))
    ok = worst[0] <= 1e-8
    record("5", ok, f"max MP residual over 12 configurations = {worst[0]:.2e} ({worst[1]})")
    assert ok


def test_criterion_06_figures_1_2():
    params, _, _, grid = build(RunConfig())
    sol = solve(RunConfig())
    info = peak_age(sol.K_bar, grid)
    ok = info.single_peaked and sol.K_bar[0] > 0 and sol.K_bar[-1] > 0 and sol.u1_bar[-1] < 0
    record("6", ok, f"single-peaked={info.single_peaked} (peak at s={info.age:.3f}), "
                    f"K(0)={sol.K_bar[0]:.4f}, K(s_bar)={sol.K_bar[-1]:.4f}, "
                    f"u1(s_bar)={sol.u1_bar[-1]:.4f}")
    assert ok


def test_criterion_07_peak_age():
    cfg = RunConfig().with_overrides(PURE)
    params, _, cost, grid = build(cfg)
    sol = solve(cfg)
    info = peak_age(sol.K_bar, grid)
    s_star = s_star_analytic(params, cost)
    b = BENCH
    K0 = cf.K_at_zero(sol.eta, b["alpha"], b["beta0"], b["mu"], b["lam"], b["s_bar"])
    Ks = cf.K_at_s_bar(sol.eta, b["alpha"], b["beta0"], b["mu"], b["lam"], b["s_bar"])
    rel0 = abs(sol.K_bar[0] / K0 - 1)
    rels = abs(sol.K_bar[-1] / Ks - 1)
    ok = (info.single_peaked and abs(info.age - s_star) <= grid.ds and rel0 <= 1e-8
          and rels <= 1e-8)
    record("7", ok, f"peak at {info.age:.4f} vs s*={s_star:.6f} (ds={grid.ds}); "
                    f"K(0) rel err {rel0:.1e}, K(s_bar) rel err {rels:.1e}")
    assert ok


def test_criterion_08_alpha_non_monotonicity():
    K3 = solve(RunConfig()).K_bar
    K12 = solve(RunConfig().with_overrides({"model.alpha": 12.0})).K_bar
    K24 = solve(RunConfig().with_overrides({"model.alpha": 24.0})).K_bar
    ok = bool(np.all(K12 > K3) and np.all(K24 < K12))
    record("8", ok, f"min(K12-K3)={np.min(K12 - K3):.4f}, min(K12-K24)={np.min(K12 - K24):.4f}")
    assert ok


def test_criterion_09_quadratic_turning_point():
    cfg = RunConfig().with_overrides(PURE)
    params, rev, cost, grid = build(cfg)
    a_hat = alpha_hat_quadratic(params, rev, cost, grid)
    step = 0.5
    scan = fd_turning_point(cfg, np.arange(1.0, 24.0 + step / 2, step))
    ok = (scan.change is not None and scan.change[0] - step <= a_hat <= scan.change[1] + step
          and scan.consistent_across_ages)
    record("9", ok, f"alpha_hat={a_hat:.4f}; finite-difference sign change in {scan.change} "
                    f"(step {step}), consistent across ages={scan.consistent_across_ages}")
    assert ok


def test_criterion_10_power_revenue():
    cfg = RunConfig().with_overrides({**PURE, **POWER})
    params, rev, cost, grid = build(cfg)
    f, _ = unit_coefficients(params, cost, grid)
    alphas = [1.0, 2.0, 4.0, 8.0, 16.0]
    etas = np.array([power_eta(a, params, rev, cost, grid, f=f) for a in alphas])
    decreasing = bool(np.all(np.diff(etas) < 0))
    ratio = etas[-1] / etas[0]
    part_a = decreasing and ratio < 0.1

    a_hat = alpha_hat_power(params, rev, cost, grid)
    step = 0.01
    scan_alphas = np.arange(0.01, 0.5 + step / 2, step)
    scan = fd_turning_point(cfg, scan_alphas)
    if a_hat is None:
        part_b = scan.change is None
    else:
        part_b = (scan.change is not None
                  and scan.change[0] - step <= a_hat <= scan.change[1] + step)
    ok = part_a and part_b
    a_hat_text = "none" if a_hat is None else f"{a_hat:.4f}"
    record("10", ok,
           f"eta(alpha) decreasing={decreasing}, eta(16)/eta(1)={ratio:.4f} (<0.1: {ratio < 0.1}); "
           f"analytic turning point={a_hat_text}, finite-difference sign change "
           f"on [0.01, 0.5] step {step}: {scan.change} "
           f"(min dK/dalpha={scan.slopes.min():.3g})")
    assert part_a, "eta(alpha) part"
    assert part_b, "analytic turning point has no matching finite-difference sign change"


def test_criterion_11_nilpotency():
    params, rev, cost, grid = build(RunConfig())
    sol = solve_equilibrium(params, rev, cost, grid)
    probe = convergence_probe(np.zeros(grid.n_nodes), sol, params, grid, 2 * params.s_bar)
    sup_after, weak_after = probe.after(params.s_bar)
    ok = np.max(sup_after) <= 1e-6 and np.max(weak_after) <= 1e-6
    record("11", ok, f"for tau in [s_bar, 2 s_bar]: max sup error {np.max(sup_after):.2e}, "
                     f"max weak error {np.max(weak_after):.2e}")
    assert ok


def test_criterion_12_nonnegativity():
    sol = solve(RunConfig())
    ok = sol.nonneg and bool(np.all(sol.K_bar >= 0))
    record("12", ok, f"nonneg flag={sol.nonneg}, min K={sol.min_K:.4f}")
    assert ok
