"""Comparative statics of the equilibrium capital profile.

Covers the benchmark figures, the hump shape of capital in age, and the
productivity level at which more productive capital starts to mean less of
it.  Analytic turning points are always paired with a finite-difference
sweep of the full solver, which is the ground truth.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import closed_forms as cf
from . import numerics as nm
from .config import RunConfig, build, resolve_param
from .equilibrium import EquilibriumSolution, lq_coefficients, lq_profiles, solve_equilibrium
from .model import LinQuad, ModelParams, Power, PurePower, Quadratic


class RegimeWarning(UserWarning):
    """A formula is applied outside the regime it was derived for."""


FIGURES = {
    1: ("K", {}),
    2: ("u1", {}),
    3: ("K", {"model.alpha": 12.0}),
    4: ("K", {"model.alpha": 24.0}),
}
PROVENANCE_KEYS = ("model.alpha", "cost.beta0", "model.mu", "model.lambda",
                   "model.s_bar", "cost.q0", "cost.w", "revenue.b", "revenue.a")


def solve(cfg: RunConfig) -> EquilibriumSolution:
    params, revenue, cost, grid = build(cfg)
    return solve_equilibrium(params, revenue, cost, grid, cfg.grid.root_tol)


@dataclass
class FigureSeries:
    fig: int
    column: str
    s: np.ndarray
    values: np.ndarray
    provenance: dict


def reproduce_figure(fig: int, cfg: RunConfig | None = None, overrides=None) -> FigureSeries:
    """Age series behind one of the four benchmark figures."""
    if fig not in FIGURES:
        raise ValueError(f"unknown figure {fig!r}; expected one of {sorted(FIGURES)}")
    column, fig_overrides = FIGURES[fig]
    cfg = (cfg or RunConfig()).with_overrides(overrides).with_overrides(fig_overrides)
    sol = solve(cfg)
    flat = cfg.flat()
    values = sol.K_bar if column == "K" else sol.u1_bar
    return FigureSeries(
        fig, column, sol.grid.nodes.copy(), values,
        {k: flat[k] for k in PROVENANCE_KEYS},
    )


@dataclass
class PeakInfo:
    age: float
    index: int
    single_peaked: bool


def peak_age(K, grid: nm.AgeGrid, rel_slack: float = 1e-10) -> PeakInfo:
    """Location of the maximum (first one on ties) and a single-peak check."""
    K = grid.check(K, "K")
    i = int(np.argmax(K))
    slack = rel_slack * float(np.max(np.abs(K)))
    d = np.diff(K)
    single = bool(np.all(d[:i] >= -slack) and np.all(d[i:] <= slack))
    return PeakInfo(float(grid.nodes[i]), i, single)


def is_purely_quadratic(cost) -> bool:
    return type(cost) is LinQuad and cost.q0 == 0 and cost.q1.const == 0.0


def s_star_analytic(params: ModelParams, cost=None) -> float:
    """Peak age of capital with purely quadratic investment costs."""
    if cost is not None and not is_purely_quadratic(cost):
        warnings.warn("peak-age formula holds only for purely quadratic costs", RegimeWarning)
    if not 2 * params.mu + params.lam > 0:
        raise ValueError("2 mu + lambda must be > 0")
    return cf.s_star(params.mu, params.lam, params.s_bar)


def unit_coefficients(params: ModelParams, cost: LinQuad, grid: nm.AgeGrid) -> tuple[float, float]:
    """``(c1 / alpha^2, c2 / alpha)`` by quadrature, i.e. ``c1, c2`` at ``alpha = 1``."""
    if not params.constant_alpha:
        raise ValueError("unit coefficients need a constant productivity")
    unit = ModelParams(params.mu, params.lam, params.s_bar, 1.0)
    w1, w2 = lq_profiles(unit, cost, grid)
    return lq_coefficients(w1, w2, unit, grid)


def alpha_hat_quadratic(params, revenue: Quadratic, cost: LinQuad, grid, printed=True) -> float:
    """Productivity at which capital stops increasing in ``alpha`` (quadratic revenue).

    ``printed=True`` evaluates the published expression; ``printed=False``
    the root of the derivative of ``alpha * eta(alpha)``.  The two agree in
    the purely quadratic regime (``c2 = 0``).  ``a = 0`` has no turning
    point and returns ``inf``.
    """
    if revenue.a == 0:
        return math.inf
    if printed and not is_purely_quadratic(cost):
        warnings.warn("turning-point formula stated for purely quadratic costs", RegimeWarning)
    f, g = unit_coefficients(params, cost, grid)
    fn = cf.alpha_hat_printed if printed else cf.alpha_hat_derived
    return float(fn(revenue.a, revenue.b, f, g))


def power_eta(alpha: float, params, revenue: Power, cost: LinQuad, grid, tol=nm.ROOT_TOL,
              f: float | None = None) -> float:
    """Marginal revenue at equilibrium for shifted power revenue and quadratic costs.

    Root of ``eta (nu + eta f alpha^2)^(1-gamma) = b gamma`` with
    ``f = c1 / alpha^2``.
    """
    if not is_purely_quadratic(cost):
        raise ValueError("power_eta needs purely quadratic costs (q0 = q1 = 0)")
    if f is None:
        f, _ = unit_coefficients(params, cost, grid)
    c1 = f * alpha * alpha
    th, g, b = revenue.nu, revenue.gamma, revenue.b
    return nm.find_root_increasing(lambda e: e * (th + e * c1) ** (1 - g) - b * g, tol)


def power_turning_condition(alpha, params, revenue: Power, cost, grid, f=None) -> float:
    """Sign expression ``1 - 2(1-g) f a^2 / (eta (1-g) + f a^2 eta + nu)`` as published."""
    if f is None:
        f, _ = unit_coefficients(params, cost, grid)
    eta = power_eta(alpha, params, revenue, cost, grid, f=f)
    g, th = revenue.gamma, revenue.nu
    return 1.0 - 2 * (1 - g) * f * alpha**2 / (eta * (1 - g) + f * alpha**2 * eta + th)


def alpha_hat_power(params, revenue: Power, cost, grid, alpha_min=1e-6, max_doublings=80):
    """Root of :func:`power_turning_condition`, or ``None`` if it never changes sign."""
    f, _ = unit_coefficients(params, cost, grid)

    def h(a):
        return power_turning_condition(a, params, revenue, cost, grid, f=f)

    lo = alpha_min
    h_lo = h(lo)
    for _ in range(max_doublings):
        hi = 2 * lo
        h_hi = h(hi)
        if h_lo > 0 >= h_hi:
            return float(brentq(h, lo, hi, xtol=1e-12, rtol=1e-14))
        lo, h_lo = hi, h_hi
    return None


@dataclass
class FiniteDifferenceScan:
    alphas: np.ndarray
    ages: np.ndarray
    slopes: np.ndarray  # (len(alphas), len(ages)) centred dK/dalpha
    change: tuple[float, float] | None  # first (alpha_i, alpha_{i+1}) with + to - change
    consistent_across_ages: bool


def fd_turning_point(cfg: RunConfig, alphas, rel_step: float = 1e-3) -> FiniteDifferenceScan:
    """Sign of ``dK/dalpha`` at ages ``0, s_bar/2, s_bar`` along a productivity grid."""
    alphas = np.asarray(alphas, dtype=float)
    s_bar = cfg.model.s_bar
    n = cfg.grid.n_nodes
    idx = np.array([0, (n - 1) // 2, n - 1])
    grid = nm.AgeGrid(s_bar, n)
    slopes = np.empty((alphas.size, idx.size))
    for k, a in enumerate(alphas):
        h = rel_step * a
        up = solve(cfg.with_overrides({"model.alpha": a + h})).K_bar[idx]
        dn = solve(cfg.with_overrides({"model.alpha": a - h})).K_bar[idx]
        slopes[k] = (up - dn) / (2 * h)
    signs = np.sign(slopes)
    consistent = bool(np.all(signs == signs[:, :1]))
    change = None
    col = signs[:, 0]
    for k in range(alphas.size - 1):
        if col[k] > 0 and col[k + 1] < 0:
            change = (float(alphas[k]), float(alphas[k + 1]))
            break
    return FiniteDifferenceScan(alphas, grid.nodes[idx], slopes, change, consistent)


@dataclass
class SweepResult:
    param_name: str
    param_values: list[float]
    solutions: list[EquilibriumSolution | None]
    errors: list[str | None] = field(default_factory=list)
    pointwise_order: np.ndarray | None = None

    @property
    def ok(self) -> list[bool]:
        return [e is None for e in self.errors]


def dominance_matrix(profiles) -> np.ndarray:
    """``+1`` if profile i exceeds profile j at every node, ``-1`` if below everywhere."""
    n = len(profiles)
    out = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(n):
            if i == j or profiles[i] is None or profiles[j] is None:
                continue
            if np.all(profiles[i] > profiles[j]):
                out[i, j] = 1
            elif np.all(profiles[i] < profiles[j]):
                out[i, j] = -1
    return out


def sweep(param: str, values, cfg: RunConfig | None = None, workers: int = 1) -> SweepResult:
    """Equilibrium for each value of one parameter; failures are recorded, not raised."""
    cfg = cfg or RunConfig()
    key = resolve_param(param, cfg)
    values = [float(v) for v in values]

    def one(v):
        try:
            return solve(cfg.with_overrides({key: v})), None
        except Exception as exc:  # recorded per value
            return None, f"{type(exc).__name__}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, values))
    else:
        results = [one(v) for v in values]
    sols = [r[0] for r in results]
    errors = [r[1] for r in results]
    profiles = [s.K_bar if s is not None else None for s in sols]
    return SweepResult(param, values, sols, errors, dominance_matrix(profiles))
