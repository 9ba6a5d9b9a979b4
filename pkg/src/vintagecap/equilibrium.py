"""Equilibrium age distributions of capital.

The fixed-point problem ``Tx = x`` collapses to the scalar equation
``eta = R'(<alpha, F(eta)>)``; :func:`solve_equilibrium` solves that equation
and rebuilds capital, costate and investment from its root.  Iterating ``T``
directly (:func:`solve_equilibrium_fixed_point`) is kept as a cross-check.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nm
from .model import (
    ConstrainedLinQuad,
    Cost,
    DomainError,
    LinPower,
    LinQuad,
    Linear,
    Log,
    ModelError,
    ModelParams,
    Power,
    PurePower,
    Quadratic,
    Revenue,
    Rprime,
    _conj_prime,
)
from .numerics import AgeGrid

log = logging.getLogger(__name__)


class ConfigurationError(ModelError):
    pass


@dataclass
class ResidualReport:
    r_T: float
    r_zeta: float
    r_u0: float
    r_u1: float
    theta_at_eta: float

    def max(self) -> float:
        return max(self.r_T, self.r_zeta, self.r_u0, self.r_u1)


@dataclass
class EquilibriumSolution:
    grid: AgeGrid
    eta: float
    Q_star: float
    K_bar: np.ndarray
    zeta_bar: np.ndarray
    u0_bar: float
    u1_bar: np.ndarray
    residuals: ResidualReport
    min_K: float
    nonneg: bool
    unique_nonnegative: bool = True
    warnings: list[str] = field(default_factory=list)


class _Setup:
    """Grid samples shared by every evaluation of F for one parameter set."""

    def __init__(self, params: ModelParams, cost: Cost, grid: AgeGrid):
        params.check()
        if abs(params.s_bar - grid.s_bar) > 1e-12 * params.s_bar:
            raise nm.InputError(f"grid s_bar {grid.s_bar} != model s_bar {params.s_bar}")
        problems = cost.problems(grid)
        if problems:
            raise ConfigurationError("; ".join(problems))
        self.params, self.cost, self.grid = params, cost, grid
        self.alpha = params.alpha_profile(grid)
        self.alpha_bar = nm.backward_discounted_tail(self.alpha, params.rate, grid)
        self.decay = np.exp(-params.mu * grid.nodes)
        self.beta1 = grid.profile(cost.beta1)
        self.q1 = grid.profile(cost.q1)

    def u0(self, v: float) -> float:
        return float(_conj_prime(self.cost, self.cost.beta0, self.cost.q0,
                                 getattr(self.cost, "M0", None), v))

    def u1(self, v: np.ndarray) -> np.ndarray:
        return _conj_prime(self.cost, self.beta1, self.q1, getattr(self.cost, "M1", None), v)

    def F(self, eta: float) -> np.ndarray:
        if not math.isfinite(eta):
            raise nm.InputError(f"eta must be finite, got {eta}")
        v = eta * self.alpha_bar
        return self.u0(v[0]) * self.decay + nm.forward_exp_convolution(
            self.u1(v), self.params.mu, self.grid
        )

    def output(self, x: np.ndarray) -> float:
        return nm.integrate(self.alpha * x, self.grid)

    def theta(self, eta: float, revenue: Revenue, soft_state_constraint=False) -> float:
        Q = self.output(self.F(eta))
        if isinstance(revenue, PurePower) and Q <= 0:
            if soft_state_constraint:
                return -math.inf
            if Q < 0:
                raise DomainError(f"output {Q} < 0 at eta = {eta}: state-constraint regime")
        return eta - Rprime(revenue, Q)


def discounted_return(params: ModelParams, grid: AgeGrid) -> np.ndarray:
    """Present value of the productivity stream of one unit of capital of each age."""
    if not params.rate > 0:
        raise ConfigurationError(f"mu + lambda must be > 0, got {params.rate}")
    return nm.backward_discounted_tail(params.alpha_profile(grid), params.rate, grid)


def F_of_eta(eta: float, params: ModelParams, cost: Cost, grid: AgeGrid) -> np.ndarray:
    """Capital profile generated when the marginal revenue is held at ``eta``."""
    return _Setup(params, cost, grid).F(eta)


def theta_of_eta(eta, params, revenue, cost, grid) -> float:
    return _Setup(params, cost, grid).theta(eta, revenue)


def apply_T(x, params, revenue, cost, grid) -> np.ndarray:
    setup = _Setup(params, cost, grid)
    return _apply_T(setup, revenue, grid.check(x, "x"))


def _apply_T(setup: _Setup, revenue: Revenue, x: np.ndarray) -> np.ndarray:
    Q = setup.output(x)
    eta = Rprime(revenue, Q)
    if not math.isfinite(eta):
        raise DomainError(f"T is undefined at output {Q}: marginal revenue is {eta}")
    return setup.F(eta)


def _residuals(setup: _Setup, revenue: Revenue, eta, K, zeta, u0, u1) -> ResidualReport:
    Q = setup.output(K)
    rp = Rprime(revenue, Q)
    TK = setup.F(rp)
    return ResidualReport(
        r_T=float(np.max(np.abs(TK - K))),
        r_zeta=float(np.max(np.abs(zeta - rp * setup.alpha_bar))),
        r_u0=abs(u0 - setup.u0(zeta[0])),
        r_u1=float(np.max(np.abs(u1 - setup.u1(zeta)))),
        theta_at_eta=abs(eta - rp),
    )


def solve_equilibrium(
    params: ModelParams,
    revenue: Revenue,
    cost: Cost,
    grid: AgeGrid,
    tol: float = nm.ROOT_TOL,
) -> EquilibriumSolution:
    """Equilibrium triple from the root of ``theta(eta) = eta - R'(<alpha, F(eta)>)``."""
    setup = _Setup(params, cost, grid)
    warnings = []
    if not params.lam > 0:
        warnings.append(
            f"lambda = {params.lam} <= 0: the optimality conditions are sufficient "
            "but not necessarily necessary"
        )
        log.warning(warnings[-1])

    def theta(eta):
        return setup.theta(eta, revenue, soft_state_constraint=True)

    unique = True
    try:
        eta = nm.find_root_increasing(theta, tol)
    except nm.NoNonnegativeRootError:
        unique = False
        warnings.append("theta(0) > 0: searched the whole line, uniqueness not guaranteed")
        log.warning(warnings[-1])
        eta = nm.find_root_on_line(theta, tol)

    K = setup.F(eta)
    zeta = eta * setup.alpha_bar
    u0 = setup.u0(zeta[0])
    u1 = setup.u1(zeta)
    residuals = _residuals(setup, revenue, eta, K, zeta, u0, u1)
    min_K = float(np.min(K))
    return EquilibriumSolution(
        grid=grid,
        eta=eta,
        Q_star=setup.output(K),
        K_bar=K,
        zeta_bar=zeta,
        u0_bar=u0,
        u1_bar=u1,
        residuals=residuals,
        min_K=min_K,
        nonneg=min_K >= 0,
        unique_nonnegative=unique,
        warnings=warnings,
    )


def solve_equilibrium_fixed_point(
    params: ModelParams,
    revenue: Revenue,
    cost: Cost,
    grid: AgeGrid,
    tol: float = nm.FIXED_POINT_TOL,
    max_iter: int = 500,
):
    """Iterate ``T`` from the zero profile; returns ``(limit, diagnostics)``."""
    setup = _Setup(params, cost, grid)
    return nm.fixed_point_iterate(
        lambda x: _apply_T(setup, revenue, x), np.zeros(grid.n_nodes), tol, max_iter
    )


def _require_lin_quad(cost):
    if type(cost) is not LinQuad:
        raise TypeError(f"linear-quadratic cost required, got {type(cost).__name__}")


def lq_profiles(params: ModelParams, cost: LinQuad, grid: AgeGrid):
    """Profiles ``w1, w2`` with ``F(eta) = eta * w1 - w2`` for quadratic costs."""
    _require_lin_quad(cost)
    setup = _Setup(params, cost, grid)
    ab = setup.alpha_bar
    w1 = ab[0] / (2 * cost.beta0) * setup.decay + nm.forward_exp_convolution(
        ab / (2 * setup.beta1), params.mu, grid
    )
    w2 = cost.q0 / (2 * cost.beta0) * setup.decay + nm.forward_exp_convolution(
        setup.q1 / (2 * setup.beta1), params.mu, grid
    )
    return w1, w2


def lq_coefficients(w1, w2, params: ModelParams, grid: AgeGrid) -> tuple[float, float]:
    alpha = params.alpha_profile(grid)
    return nm.integrate(alpha * w1, grid), nm.integrate(alpha * w2, grid)


def closed_form_eta(revenue: Revenue, c1: float, c2: float, tol: float = 1e-13) -> float:
    """Root of ``eta = R'(eta c1 - c2)`` for quadratic costs.

    Explicit for quadratic, linear and logarithmic revenue; a scalar root
    solve for the power families.
    """
    if isinstance(revenue, Quadratic):
        return (revenue.b + 2 * revenue.a * c2) / (1 + 2 * revenue.a * c1)
    if isinstance(revenue, Linear):
        return revenue.b
    if isinstance(revenue, Log):
        if c1 - c2 < 0:
            # eta = 1 already gives negative output, where R' = 1
            return 1.0
        if c1 == 0:
            if c2 < 1:
                return 1.0 / (1.0 - c2)
            raise ModelError(f"degenerate log case c1 = 0 with c2 = {c2} >= 1")
        d = 1.0 - c2
        return (math.sqrt(d * d + 4 * c1) - d) / (2 * c1)
    if isinstance(revenue, (Power, PurePower)):
        def g(eta):
            Q = eta * c1 - c2
            if isinstance(revenue, PurePower) and Q <= 0:
                return -math.inf
            return eta - Rprime(revenue, Q)

        return nm.find_root_increasing(g, tol)
    raise TypeError(f"unknown revenue {revenue!r}")
