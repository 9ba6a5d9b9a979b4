"""Transport dynamics along characteristics, costates and equilibrium audits.

With ``dtau == ds`` each characteristic ``s - tau = const`` passes through
grid nodes, so the transport is marched node-to-node without numerical
diffusion.  The distributed investment is integrated along a characteristic
with the same cell weights as :func:`numerics.forward_exp_convolution`,
which makes an equilibrium profile an exact fixed point of one time step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nm
from .equilibrium import EquilibriumSolution, ResidualReport, _residuals, _Setup
from .model import ModelParams, Rprime, Revenue, Cost
from .numerics import AgeGrid, InputError


@dataclass(frozen=True)
class ConstantControl:
    u0: float
    u1: np.ndarray


@dataclass(frozen=True)
class TabulatedControl:
    """Controls sampled at ``times``; linearly interpolated in time."""

    times: np.ndarray
    u0: np.ndarray
    u1: np.ndarray  # shape (len(times), n_nodes)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        u0 = np.asarray(self.u0, dtype=float)
        u1 = np.asarray(self.u1, dtype=float)
        if t.ndim != 1 or u0.shape != t.shape or u1.ndim != 2 or u1.shape[0] != t.size:
            raise InputError("tabulated control arrays have inconsistent lengths")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InputError("control times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "u1", u1)

    def at(self, tau: float) -> tuple[float, np.ndarray]:
        t = self.times
        if tau < t[0] - 1e-9 or tau > t[-1] + 1e-9:
            raise InputError(f"control table covers [{t[0]}, {t[-1]}], needed tau = {tau}")
        j = int(np.clip(np.searchsorted(t, tau) - 1, 0, max(t.size - 2, 0)))
        if t.size == 1:
            return float(self.u0[0]), self.u1[0]
        lam = (tau - t[j]) / (t[j + 1] - t[j])
        lam = min(max(lam, 0.0), 1.0)
        return (
            float((1 - lam) * self.u0[j] + lam * self.u0[j + 1]),
            (1 - lam) * self.u1[j] + lam * self.u1[j + 1],
        )


ControlPath = ConstantControl | TabulatedControl


@dataclass
class Trajectory:
    times: np.ndarray
    frames: np.ndarray  # shape (len(times), n_nodes)
    grid: AgeGrid


def _control_at(controls, tau, grid):
    if isinstance(controls, ConstantControl):
        u0, u1 = controls.u0, controls.u1
    else:
        u0, u1 = controls.at(tau)
    u1 = np.asarray(u1, dtype=float)
    if u1.shape != (grid.n_nodes,):
        raise InputError(f"u1 has shape {u1.shape}, grid has {grid.n_nodes} nodes")
    if not (math.isfinite(u0) and np.all(np.isfinite(u1))):
        raise InputError(f"non-finite control values at tau = {tau}")
    return u0, u1


def simulate(
    x0,
    controls: ControlPath,
    params: ModelParams,
    grid: AgeGrid,
    t_final: float,
    t0: float = 0.0,
) -> Trajectory:
    """March ``K_t + K_s + mu K = u1``, ``K(tau, 0) = u0(tau)`` from ``K(t0) = x0``.

    Frame 0 is ``x0`` as given.  For ``tau > t0`` the node on the corner
    characteristic ``s = tau - t0`` follows the boundary branch, so any
    mismatch between ``x0(0)`` and ``u0(t0)`` is gone once ``tau >= t0 + s_bar``.
    """
    x0 = grid.check(x0, "x0")
    if not (math.isfinite(params.mu) and params.mu >= 0):
        raise InputError(f"mu must be finite and >= 0, got {params.mu}")
    h = grid.ds
    steps = round((t_final - t0) / h)
    if steps < 0 or abs(steps * h - (t_final - t0)) > 1e-9 * max(1.0, abs(t_final)):
        raise InputError(f"t_final - t0 = {t_final - t0} is not a multiple of ds = {h}")
    w = nm.cell_weights(params.mu, h)
    times = t0 + h * np.arange(steps + 1)
    frames = np.empty((steps + 1, grid.n_nodes))
    frames[0] = x0
    u0_prev, u1_prev = _control_at(controls, times[0], grid)
    # u1 is cubic in age and linear in time along each characteristic
    full_prev = nm.cell_integrals(u1_prev, w)
    early_prev = full_prev - nm.cell_integrals(u1_prev, w, "late")
    # the characteristic leaving the corner (t0, 0) carries the boundary trace
    start = x0.copy()
    start[0] = u0_prev
    constant = isinstance(controls, ConstantControl)
    for j in range(steps):
        u0_next, u1_next = _control_at(controls, times[j + 1], grid)
        if constant:
            inflow = full_prev
        else:
            late_next = nm.cell_integrals(u1_next, w, "late")
            full_next = nm.cell_integrals(u1_next, w)
            inflow = early_prev + late_next
            early_prev = full_next - late_next
        prev = start if j == 0 else frames[j]
        nxt = frames[j + 1]
        nxt[1:] = w.d * prev[:-1] + inflow
        nxt[0] = u0_next
    return Trajectory(times, frames, grid)


def equilibrium_control(eq: EquilibriumSolution) -> ConstantControl:
    return ConstantControl(eq.u0_bar, eq.u1_bar)


def costate_field(Q_path, params: ModelParams, revenue: Revenue, grid: AgeGrid) -> np.ndarray:
    """Costate at one date from the output path over the look-ahead window.

    ``Q_path[k]`` is the output ``k * ds`` after the current date, for
    ``k = 0 .. n_nodes - 1``.  Node ``i`` integrates
    ``exp(-(lam+mu)(xi - s_i)) R'(Q(xi - s_i)) alpha(xi)`` over ``xi`` in
    ``[s_i, s_bar]``, the product ``R' * alpha`` interpolated by local cubics.
    """
    Q_path = np.asarray(Q_path, dtype=float)
    if Q_path.ndim != 1 or Q_path.size < grid.n_nodes:
        raise InputError(
            f"output path must cover [tau, tau + s_bar]: need {grid.n_nodes} samples, "
            f"got {Q_path.size}"
        )
    if not np.all(np.isfinite(Q_path)):
        raise InputError("output path contains non-finite values")
    alpha = params.alpha_profile(grid)
    rp = np.array([Rprime(revenue, q) for q in Q_path[: grid.n_nodes]])
    n = grid.n_nodes
    w = nm.cell_weights(params.rate, grid.ds)
    disc = w.d ** np.arange(n - 1)
    zeta = np.zeros(n)
    for i in range(n - 1):
        g = rp[: n - i] * alpha[i:]
        cells = nm.cell_integrals(g[::-1], w)[::-1]
        zeta[i] = np.dot(disc[: cells.size], cells)
    return zeta


def mp_residuals(candidate: EquilibriumSolution, params, revenue, cost, grid) -> ResidualReport:
    """Stationarity residuals of a candidate state/costate/control triple."""
    setup = _Setup(params, cost, grid)
    c = candidate
    return _residuals(
        setup, revenue, c.eta,
        grid.check(c.K_bar, "K_bar"), grid.check(c.zeta_bar, "zeta_bar"),
        float(c.u0_bar), grid.check(c.u1_bar, "u1_bar"),
    )


def primitive_weak_norm(f, grid: AgeGrid) -> float:
    """L2 quadrature norm of the primitive ``s -> int_0^s f``."""
    P = nm.cumulative_trapezoid(f, grid)
    return math.sqrt(nm.trapezoid(P * P, grid))


@dataclass
class ConvergenceSeries:
    times: np.ndarray
    sup_error: np.ndarray
    weak_error: np.ndarray
    trajectory: Trajectory

    def after(self, tau: float, tol: float = 1e-9):
        mask = self.times >= tau - tol
        return self.sup_error[mask], self.weak_error[mask]


def convergence_probe(
    x0,
    eq: EquilibriumSolution,
    params: ModelParams,
    grid: AgeGrid,
    t_final: float | None = None,
) -> ConvergenceSeries:
    """Distance to the equilibrium profile under the constant equilibrium control."""
    if t_final is None:
        t_final = grid.s_bar
    if t_final < grid.s_bar - 1e-12:
        raise InputError(f"t_final = {t_final} must be >= s_bar = {grid.s_bar}")
    traj = simulate(x0, equilibrium_control(eq), params, grid, t_final)
    diff = traj.frames - eq.K_bar
    sup = np.max(np.abs(diff), axis=1)
    weak = np.array([primitive_weak_norm(row, grid) for row in diff])
    return ConvergenceSeries(traj.times, sup, weak, traj)
