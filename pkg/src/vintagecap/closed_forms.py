"""Analytic expressions for constant productivity and linear-quadratic costs.

Setting: ``alpha(s) = alpha``, ``beta1 = beta0``, ``q1(s) = q0 exp(-w s)``.
These are the reference values that the quadrature path is checked against;
``printed_*`` functions reproduce formulas exactly as published, including
their sign slips, so that discrepancies can be reported.
"""
from __future__ import annotations

import numpy as np


def alpha_bar_constant(s, alpha, mu, lam, s_bar):
    r = mu + lam
    return alpha * (1.0 - np.exp(-r * (s_bar - np.asarray(s, dtype=float)))) / r


def w1_profile(s, alpha, beta0, mu, lam, s_bar):
    s = np.asarray(s, dtype=float)
    r = mu + lam
    m = 2 * mu + lam
    E = np.exp(-r * s_bar)
    ems = np.exp(-mu * s)
    bracket = ems - ems * E + (1 - ems) / mu - E / m * (np.exp(r * s) - ems)
    return alpha / (2 * beta0 * r) * bracket


def w2_profile(s, q0, beta0, mu, w):
    s = np.asarray(s, dtype=float)
    return q0 / (2 * beta0 * (mu - w)) * (np.exp(-w * s) - np.exp(-mu * s) * (1 - mu + w))


def c1_coefficient(alpha, beta0, mu, lam, s_bar):
    r = mu + lam
    m = 2 * mu + lam
    inner = (
        (1 - mu) / mu**2 * (np.exp(-mu * s_bar) - 1)
        + (m - 1) / (mu * m) * np.exp(-m * s_bar)
        + s_bar / mu
        - 1 / (m * r)
        + (1 - r) / (mu * r) * np.exp(-r * s_bar)
    )
    return alpha**2 / (2 * beta0 * r) * inner


def c2_coefficient(alpha, q0, beta0, mu, w, s_bar):
    return alpha * q0 / (2 * beta0 * (mu - w)) * (
        (mu - w - 1) / mu * (1 - np.exp(-mu * s_bar)) + (1 - np.exp(-w * s_bar)) / w
    )


def quadratic_eta(a, b, c1, c2):
    """Root of ``eta = b - 2a(eta c1 - c2)``."""
    return (b + 2 * a * c2) / (1 + 2 * a * c1)


def printed_eta_sensitivity(a, b, c1, c2):
    """``(b - 2a c2)/(1 + 2a c1)`` as printed with the benchmark discussion."""
    return (b - 2 * a * c2) / (1 + 2 * a * c1)


def printed_eta_lemma(a, b, c1, c2):
    """Coefficient of ``w1`` in ``x = -w2 - (2a c2 + b)/(1 + 2a c1) w1`` as printed."""
    return -(2 * a * c2 + b) / (1 + 2 * a * c1)


def s_star(mu, lam, s_bar):
    """Peak age of the capital profile under purely quadratic costs."""
    m = 2 * mu + lam
    r = mu + lam
    arg = m / r * ((1 - mu) * np.exp(r * s_bar) + mu * (1 - 1 / m))
    return float(np.log(arg) / m)


def K_at_zero(eta, alpha, beta0, mu, lam, s_bar):
    r = mu + lam
    return eta * alpha / (2 * beta0 * r) * (1 - np.exp(-r * s_bar))


def K_at_s_bar(eta, alpha, beta0, mu, lam, s_bar):
    r = mu + lam
    m = 2 * mu + lam
    ems = np.exp(-mu * s_bar)
    return eta * alpha / (2 * beta0 * r) * (
        -ems * (-1 + 1 / mu) + ems * np.exp(-r * s_bar) * (1 / m - 1) + 1 / mu - 1 / m
    )


def alpha_hat_printed(a, b, c1_unit, c2_unit):
    """Turning point in productivity, evaluated exactly as printed.

    ``c1_unit = c1 / alpha**2`` and ``c2_unit = c2 / alpha``.
    """
    return (np.sqrt(c2_unit + c1_unit * b**2 / (2 * a)) - c2_unit) / (c1_unit * b)


def alpha_hat_derived(a, b, c1_unit, c2_unit):
    """Positive root of ``d/dalpha [(b alpha + 2a c2 alpha^2)/(1 + 2a c1 alpha^2)]``.

    Uses ``eta = (b + 2a c2)/(1 + 2a c1)``; the numerator of the derivative is
    ``b + 4a c2 alpha - 2a b c1 alpha^2``.
    """
    g, f = c2_unit, c1_unit
    return (g + np.sqrt(g * g + b * b * f / (2 * a))) / (b * f)
