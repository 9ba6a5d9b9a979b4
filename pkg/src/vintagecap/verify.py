"""Invariant battery behind ``vintagecap verify``.

Hard checks cover quadrature consistency, solver residuals and the
route-to-route agreement of independent computations.  Soft checks compare
against formulas as published (some carry sign slips) or record facts that
do not invalidate the equilibrium, such as a negative capital stock.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_forms as cf
from . import numerics as nm
from .config import RunConfig, build
from .dynamics import convergence_probe
from .equilibrium import (
    _Setup,
    closed_form_eta,
    lq_coefficients,
    lq_profiles,
    solve_equilibrium,
    solve_equilibrium_fixed_point,
)
from .model import DomainError, LinQuad, Quadratic

KERNEL_NODES = 4001
KERNEL_TOL = 1e-6


@dataclass
class Check:
    name: str
    hard: bool
    passed: bool
    value: float
    threshold: float
    note: str = ""


def _section6_setting(cfg: RunConfig, cost) -> bool:
    c = cfg.cost
    return (
        type(cost) is LinQuad
        and cfg.model.alpha_table is None
        and c.beta1_table is None
        and (c.beta1 is None or c.beta1 == c.beta0)
        and c.q1_table is None
        and c.w is not None
        and c.w > 0
        and c.w != cfg.model.mu
    )


def run_checks(cfg: RunConfig, tol: float | None = None) -> list[Check]:
    tol = cfg.verify.tol if tol is None else tol
    shift = cfg.verify.closed_form_perturbation
    params, revenue, cost, grid = build(cfg)
    checks: list[Check] = []

    def add(name, hard, value, threshold, note=""):
        value = float(value)
        ok = math.isfinite(value) and value <= threshold
        checks.append(Check(name, hard, ok, value, threshold, note))

    sol = solve_equilibrium(params, revenue, cost, grid, cfg.grid.root_tol)
    res = sol.residuals
    add("theta_residual", True, res.theta_at_eta, cfg.grid.root_tol)
    add("residual_T", True, res.r_T, tol)
    add("residual_zeta", True, res.r_zeta, tol)
    add("residual_u0", True, res.r_u0, tol)
    add("residual_u1", True, res.r_u1, tol)
    add("zeta_at_s_bar", True, abs(sol.zeta_bar[-1]), 0.0)
    setup = _Setup(params, cost, grid)
    add("Q_star_quadrature", True, abs(sol.Q_star - setup.output(sol.K_bar)),
        1e-12 * max(1.0, abs(sol.Q_star)))

    try:
        limit, diag = solve_equilibrium_fixed_point(
            params, revenue, cost, grid, cfg.grid.fp_tol, cfg.grid.max_iter
        )
        add("fixed_point_agreement", True, np.max(np.abs(limit - sol.K_bar)), tol,
            f"iterations={diag.iterations} contraction={diag.contraction_factor}")
    except nm.NonConvergenceError as exc:
        add("fixed_point_agreement", False, math.inf, tol,
            f"T-iteration did not converge; last ratio {exc.last_ratio}")
    except DomainError as exc:
        add("fixed_point_agreement", False, math.inf, tol, f"T-iteration not applicable: {exc}")

    if params.constant_alpha:
        ab = setup.alpha_bar
        exact = cf.alpha_bar_constant(grid.nodes, params.alpha, params.mu, params.lam,
                                      params.s_bar)
        add("alpha_bar_analytic", True, np.max(np.abs(ab - exact)), tol)

    if type(cost) is LinQuad:
        w1, w2 = lq_profiles(params, cost, grid)
        F = setup.F(sol.eta)
        add("lq_identity", True, np.max(np.abs(F - (sol.eta * w1 - w2))),
            1e-12 * max(1.0, float(np.max(np.abs(F)))))
        c1, c2 = lq_coefficients(w1, w2, params, grid)
        try:
            eta_cf = closed_form_eta(revenue, c1, c2)
            add("closed_form_eta", True, abs(eta_cf - sol.eta), 1e-10)
        except Exception as exc:
            add("closed_form_eta", True, math.inf, 1e-10, f"{type(exc).__name__}: {exc}")

        if _section6_setting(cfg, cost):
            m, c = cfg.model, cfg.cost
            fine = nm.AgeGrid(params.s_bar, KERNEL_NODES)
            fw1, fw2 = lq_profiles(params, cost, fine)
            s = fine.nodes
            add("w1_closed_form", False,
                np.max(np.abs(fw1 - cf.w1_profile(s, m.alpha, c.beta0, m.mu, m.lam, m.s_bar)
                              - shift)), KERNEL_TOL, f"N={KERNEL_NODES}")
            add("w2_closed_form", False,
                np.max(np.abs(fw2 - cf.w2_profile(s, c.q0, c.beta0, m.mu, c.w) - shift)),
                KERNEL_TOL, f"N={KERNEL_NODES}")
            fc1, fc2 = lq_coefficients(fw1, fw2, params, fine)
            k1 = cf.c1_coefficient(m.alpha, c.beta0, m.mu, m.lam, m.s_bar) + shift
            k2 = cf.c2_coefficient(m.alpha, c.q0, c.beta0, m.mu, c.w, m.s_bar) + shift
            add("c1_closed_form", False, abs(fc1 - k1) / max(1.0, abs(k1)), 1e-6,
                "relative, N=4001")
            add("c2_closed_form", False, abs(fc2 - k2) / max(1.0, abs(k2)), 1e-6,
                "relative, N=4001")

        if isinstance(revenue, Quadratic):
            a, b = revenue.a, revenue.b
            add("printed_eta_sensitivity_sign", False,
                abs(cf.printed_eta_sensitivity(a, b, c1, c2) + shift - sol.eta), 1e-10,
                "(b - 2a c2)/(1 + 2a c1) as printed")
            add("printed_eta_lemma_sign", False,
                abs(cf.printed_eta_lemma(a, b, c1, c2) + shift - sol.eta), 1e-10,
                "-(2a c2 + b)/(1 + 2a c1) as printed")

    probe = convergence_probe(np.zeros(grid.n_nodes), sol, params, grid, params.s_bar)
    sup_after, weak_after = probe.after(params.s_bar)
    add("nilpotent_convergence_sup", True, np.max(sup_after), 1e-6, "x0 = 0, tau >= s_bar")
    add("nilpotent_convergence_weak", True, np.max(weak_after), 1e-6, "x0 = 0, tau >= s_bar")

    add("nonnegative_capital", False, max(0.0, -sol.min_K), 0.0, f"min K = {sol.min_K}")
    add("positive_discount", False, 0.0 if params.lam > 0 else 1.0, 0.0,
        "lambda > 0 needed for necessity of the optimality conditions")
    add("unique_nonnegative_root", False, 0.0 if sol.unique_nonnegative else 1.0, 0.0)
    return checks
