"""Model parameters and the revenue and investment-cost families.

Costs follow the convention ``c(u) = q*u + beta*u**2`` so the conjugate
derivative of the unconstrained quadratic family is ``(v - q) / (2*beta)``.
The ``conj*_prime`` functions return the optimal investment for a given
shadow value of capital.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .numerics import AgeGrid


class ModelError(ValueError):
    """Invalid parameter record or evaluation outside a family's domain."""


class DomainError(ModelError):
    pass


def _finite(x) -> bool:
    return isinstance(x, (int, float, np.floating, np.integer)) and math.isfinite(x)


@dataclass(frozen=True)
class ModelParams:
    """Depreciation ``mu``, discount ``lam``, maximal age ``s_bar`` and productivity.

    ``alpha`` is either a constant or a callable of age (vectorised over numpy
    arrays).  A constant productivity does not vanish at ``s_bar``; the flag
    :attr:`constant_alpha` records that regime.
    """

    mu: float
    lam: float
    s_bar: float
    alpha: Union[float, Callable] = 1.0

    @property
    def constant_alpha(self) -> bool:
        return not callable(self.alpha)

    @property
    def rate(self) -> float:
        return self.mu + self.lam

    def alpha_profile(self, grid: AgeGrid) -> np.ndarray:
        return grid.profile(self.alpha)

    def problems(self, require_positive_discount: bool = False) -> list[str]:
        out = []
        if not (_finite(self.mu) and self.mu > 0):
            out.append(f"model.mu must be > 0 (got {self.mu})")
        if not _finite(self.lam):
            out.append(f"model.lambda must be finite (got {self.lam})")
        elif _finite(self.mu) and not self.mu + self.lam > 0:
            out.append(
                f"model.mu + model.lambda must be > 0 (got {self.mu} + {self.lam})"
            )
        elif require_positive_discount and not self.lam > 0:
            out.append(f"model.lambda must be > 0 (got {self.lam})")
        if not (_finite(self.s_bar) and self.s_bar > 0):
            out.append(f"model.s_bar must be > 0 (got {self.s_bar})")
        if not callable(self.alpha) and not _finite(self.alpha):
            out.append(f"model.alpha must be finite (got {self.alpha})")
        return out

    def check(self) -> "ModelParams":
        problems = self.problems()
        if problems:
            raise ModelError("; ".join(problems))
        return self


# --------------------------------------------------------------------------
# Revenues
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Quadratic:
    """``R(Q) = b*Q - a*Q**2``."""

    a: float
    b: float

    def problems(self):
        return [] if _finite(self.a) and self.a >= 0 and _finite(self.b) else [
            f"revenue quadratic needs a >= 0 and finite b (got a={self.a}, b={self.b})"
        ]


@dataclass(frozen=True)
class Log:
    """``R(Q) = ln(1 + Q)`` for ``Q >= 0``, linear below."""

    def problems(self):
        return []


@dataclass(frozen=True)
class Power:
    """``R(Q) = b*((nu + Q)**gamma - nu**gamma)`` for ``Q >= 0``, linear below."""

    b: float
    gamma: float
    nu: float

    def problems(self):
        out = []
        if not (_finite(self.b) and self.b > 0):
            out.append(f"revenue.b must be > 0 (got {self.b})")
        if not (_finite(self.gamma) and 0 < self.gamma < 1):
            out.append(f"revenue.gamma must lie in (0, 1) (got {self.gamma})")
        if not (_finite(self.nu) and self.nu > 0):
            out.append(f"revenue.nu must be > 0 (got {self.nu})")
        return out


@dataclass(frozen=True)
class PurePower:
    """``R(Q) = b*Q**gamma`` on ``Q >= 0``; negative output is infeasible."""

    b: float
    gamma: float

    def problems(self):
        out = []
        if not (_finite(self.b) and self.b > 0):
            out.append(f"revenue.b must be > 0 (got {self.b})")
        if not (_finite(self.gamma) and 0 < self.gamma < 1):
            out.append(f"revenue.gamma must lie in (0, 1) (got {self.gamma})")
        return out


@dataclass(frozen=True)
class Linear:
    """``R(Q) = b*Q``."""

    b: float

    def problems(self):
        return [] if _finite(self.b) else [f"revenue.b must be finite (got {self.b})"]


Revenue = Union[Quadratic, Log, Power, PurePower, Linear]


def R(rev: Revenue, Q: float) -> float:
    if not math.isfinite(Q):
        raise ModelError(f"output must be finite, got {Q}")
    if isinstance(rev, Quadratic):
        return rev.b * Q - rev.a * Q * Q
    if isinstance(rev, Log):
        return math.log1p(Q) if Q >= 0 else Q
    if isinstance(rev, Power):
        if Q >= 0:
            return rev.b * ((rev.nu + Q) ** rev.gamma - rev.nu**rev.gamma)
        return rev.b * rev.gamma * rev.nu ** (rev.gamma - 1) * Q
    if isinstance(rev, PurePower):
        if Q < 0:
            raise DomainError(f"pure power revenue undefined for Q = {Q} < 0")
        return rev.b * Q**rev.gamma
    if isinstance(rev, Linear):
        return rev.b * Q
    raise TypeError(f"unknown revenue {rev!r}")


def Rprime(rev: Revenue, Q: float) -> float:
    """Marginal revenue; ``inf`` for :class:`PurePower` at ``Q == 0``."""
    if not math.isfinite(Q):
        raise ModelError(f"output must be finite, got {Q}")
    if isinstance(rev, Quadratic):
        return rev.b - 2.0 * rev.a * Q
    if isinstance(rev, Log):
        return 1.0 / (1.0 + Q) if Q >= 0 else 1.0
    if isinstance(rev, Power):
        base = rev.nu + Q if Q >= 0 else rev.nu
        return rev.b * rev.gamma * base ** (rev.gamma - 1)
    if isinstance(rev, PurePower):
        if Q < 0:
            raise DomainError(f"pure power revenue undefined for Q = {Q} < 0")
        if Q == 0:
            return math.inf
        return rev.b * rev.gamma * Q ** (rev.gamma - 1)
    if isinstance(rev, Linear):
        return rev.b
    raise TypeError(f"unknown revenue {rev!r}")


# --------------------------------------------------------------------------
# Costs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AgeFunction:
    """A function of age given either by a constant, a callable, or a table.

    Tables are ``(ages, values)`` pairs linearly interpolated in age.
    """

    const: float | None = None
    func: object = None
    table: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def of(cls, x) -> "AgeFunction":
        if isinstance(x, AgeFunction):
            return x
        if callable(x):
            return cls(func=x)
        if isinstance(x, tuple) and len(x) == 2:
            ages, vals = (np.asarray(v, dtype=float) for v in x)
            return cls(table=(ages, vals))
        return cls(const=float(x))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.const is not None:
            return np.full(s.shape, self.const) if s.ndim else self.const
        if self.func is not None:
            out = np.broadcast_to(np.asarray(self.func(s), dtype=float), s.shape)
            return out.copy() if s.ndim else float(out)
        ages, vals = self.table
        out = np.interp(s, ages, vals)
        return out if s.ndim else float(out)

    def minimum(self, grid: AgeGrid) -> float:
        if self.const is not None:
            return self.const
        if self.table is not None:
            return float(np.min(self.table[1]))
        return float(np.min(self(grid.nodes)))


def exp_decay(q0: float, w: float) -> AgeFunction:
    """``s -> q0 * exp(-w s)``, the age-discounted acquisition price."""
    if q0 == 0:
        return AgeFunction(const=0.0)
    return AgeFunction(func=lambda s: q0 * np.exp(-w * s))


@dataclass(frozen=True)
class LinQuad:
    """``C0(u) = q0 u + beta0 u^2``, ``c1(s, u) = q1(s) u + beta1(s) u^2``."""

    beta0: float
    beta1: AgeFunction
    q0: float
    q1: AgeFunction

    def __post_init__(self):
        object.__setattr__(self, "beta1", AgeFunction.of(self.beta1))
        object.__setattr__(self, "q1", AgeFunction.of(self.q1))

    def _base_problems(self, grid):
        out = []
        if not (_finite(self.beta0) and self.beta0 > 0):
            out.append(f"cost.beta0 must be > 0 (got {self.beta0})")
        if grid is not None and not self.beta1.minimum(grid) > 0:
            out.append("cost.beta1 must be bounded below by a positive constant")
        if not _finite(self.q0):
            out.append(f"cost.q0 must be finite (got {self.q0})")
        return out

    def problems(self, grid: AgeGrid | None = None):
        return self._base_problems(grid)


@dataclass(frozen=True)
class ConstrainedLinQuad(LinQuad):
    """Quadratic costs with controls confined to ``|u0| <= M0``, ``|u1| <= M1``."""

    M0: float = 1.0
    M1: float = 1.0

    def problems(self, grid: AgeGrid | None = None):
        out = self._base_problems(grid)
        for name in ("M0", "M1"):
            v = getattr(self, name)
            if not (_finite(v) and v > 0):
                out.append(f"cost.{name} must be > 0 (got {v})")
        return out


@dataclass(frozen=True)
class LinPower(LinQuad):
    """``q u + beta ((u + theta)^p - theta^p)`` on ``u >= 0``, ``+inf`` otherwise."""

    p: float = 3.0
    theta: float = 0.0

    def problems(self, grid: AgeGrid | None = None):
        out = self._base_problems(grid)
        if not (_finite(self.p) and self.p > 2):
            out.append(f"cost.p must be > 2 (got {self.p})")
        if not (_finite(self.theta) and self.theta >= 0):
            out.append(f"cost.theta must be >= 0 (got {self.theta})")
        return out


Cost = Union[LinQuad, ConstrainedLinQuad, LinPower]


def _conj_prime(cost: Cost, beta, q, M, v):
    """Vectorised conjugate derivative for one component of the cost."""
    x = v - q
    if isinstance(cost, LinPower):
        p, th = cost.p, cost.theta
        threshold = beta * p * th ** (p - 1)
        active = x >= threshold
        safe = np.where(active, x, threshold)
        out = (safe / (beta * p)) ** (1.0 / (p - 1.0)) - th
        return np.where(active, np.maximum(out, 0.0), 0.0)
    u = x / (2.0 * beta)
    if isinstance(cost, ConstrainedLinQuad):
        u = np.clip(u, -M, M)
    return u


def conj0_prime(cost: Cost, v: float) -> float:
    """Optimal new-capital investment for shadow value ``v`` of age-0 capital."""
    if not math.isfinite(v):
        raise ModelError(f"shadow value must be finite, got {v}")
    return float(_conj_prime(cost, cost.beta0, cost.q0, getattr(cost, "M0", None), v))


def conj1_prime(cost: Cost, s, v, s_bar: float | None = None):
    """Optimal age-``s`` investment for shadow value ``v`` (vectorised)."""
    s_arr = np.asarray(s, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v_arr)):
        raise ModelError("shadow values must be finite")
    if np.any(s_arr < 0) or (s_bar is not None and np.any(s_arr > s_bar * (1 + 1e-12))):
        raise DomainError(f"age outside [0, {s_bar}]")
    out = _conj_prime(cost, cost.beta1(s_arr), cost.q1(s_arr), getattr(cost, "M1", None), v_arr)
    return float(out) if np.ndim(out) == 0 else out
