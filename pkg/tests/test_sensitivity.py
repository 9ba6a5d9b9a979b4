import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vintagecap import closed_forms as cf
from vintagecap import numerics as nm
from vintagecap.config import RunConfig, build
from vintagecap.model import LinQuad, ModelParams, Power, Quadratic
from vintagecap.sensitivity import (
    FIGURES,
    RegimeWarning,
    alpha_hat_power,
    alpha_hat_quadratic,
    dominance_matrix,
    fd_turning_point,
    peak_age,
    power_eta,
    reproduce_figure,
    s_star_analytic,
    solve,
    sweep,
    unit_coefficients,
)

PURE = {"cost.q0": 0.0}


def test_s_star_value():
    assert cf.s_star(0.2, 0.1, 10.0) == pytest.approx(6.5503, abs=1e-3)


def test_s_star_warns_outside_regime(bench):
    params, _, cost, _ = bench
    with pytest.warns(RegimeWarning):
        s_star_analytic(params, cost)


def test_peak_age_detects_shape():
    g = nm.AgeGrid(4.0, 401)
    s = g.nodes
    info = peak_age(-(s - 1.5) ** 2, g)
    assert info.age == pytest.approx(1.5) and info.single_peaked
    assert not peak_age(np.sin(3 * s), g).single_peaked


def test_pure_quadratic_peak_and_endpoints():
    cfg = RunConfig().with_overrides(PURE)
    params, _, cost, grid = build(cfg)
    sol = solve(cfg)
    info = peak_age(sol.K_bar, grid)
    assert info.single_peaked
    assert abs(info.age - s_star_analytic(params, cost)) <= grid.ds
    K0 = cf.K_at_zero(sol.eta, 3.0, 0.5, 0.2, 0.1, 10.0)
    Ks = cf.K_at_s_bar(sol.eta, 3.0, 0.5, 0.2, 0.1, 10.0)
    assert sol.K_bar[0] == pytest.approx(K0, rel=1e-8)
    assert sol.K_bar[-1] == pytest.approx(Ks, rel=1e-8)


def test_unit_coefficients_scale(bench):
    params, _, cost, grid = bench
    f, g = unit_coefficients(params, cost, grid)
    from vintagecap.equilibrium import lq_coefficients, lq_profiles

    c1, c2 = lq_coefficients(*lq_profiles(params, cost, grid), params, grid)
    assert c1 == pytest.approx(f * 9.0, rel=1e-12)
    assert c2 == pytest.approx(g * 3.0, rel=1e-12)


def test_alpha_hat_formulas_agree_when_purely_quadratic():
    cfg = RunConfig().with_overrides(PURE)
    params, rev, cost, grid = build(cfg)
    printed = alpha_hat_quadratic(params, rev, cost, grid, printed=True)
    derived = alpha_hat_quadratic(params, rev, cost, grid, printed=False)
    assert printed == pytest.approx(derived, rel=1e-12)
    assert alpha_hat_quadratic(params, Quadratic(0.0, 1.0), cost, grid) == np.inf


@given(a=st.floats(1e-6, 1e-3), f=st.floats(1.0, 500.0), g=st.floats(0.0, 200.0))
def test_derived_alpha_hat_maximises_alpha_eta(a, f, g):
    ah = cf.alpha_hat_derived(a, 1.0, f, g)

    def ke(al):  # alpha * eta(alpha) with eta = (b + 2a c2)/(1 + 2a c1)
        return al * (1 + 2 * a * g * al) / (1 + 2 * a * f * al * al)

    assert ke(ah) >= ke(ah * 0.99) and ke(ah) >= ke(ah * 1.01)


def test_printed_alpha_hat_warns_with_linear_costs(bench):
    params, rev, cost, grid = bench
    with pytest.warns(RegimeWarning):
        alpha_hat_quadratic(params, rev, cost, grid)


def test_power_eta_solves_implicit_equation():
    cfg = RunConfig().with_overrides(PURE)
    params, _, cost, grid = build(cfg)
    rev = Power(1.0, 0.2, 1e-3)
    f, _ = unit_coefficients(params, cost, grid)
    for al in (1.0, 4.0):
        eta = power_eta(al, params, rev, cost, grid, f=f)
        assert eta * (1e-3 + eta * f * al * al) ** 0.8 == pytest.approx(0.2, rel=1e-10)
    with pytest.raises(ValueError):
        power_eta(1.0, params, rev, LinQuad(0.5, 0.5, 5.0, 0.0), grid)


def test_alpha_hat_power_returns_root_or_none():
    cfg = RunConfig().with_overrides(PURE)
    params, _, cost, grid = build(cfg)
    ah = alpha_hat_power(params, Power(1.0, 0.2, 1e-3), cost, grid)
    assert ah is None or ah > 0


def test_fd_scan_shapes():
    cfg = RunConfig().with_overrides({**PURE, "grid.n_nodes": 201})
    scan = fd_turning_point(cfg, [2.0, 30.0])
    assert scan.slopes.shape == (2, 3)
    assert scan.change == (2.0, 30.0)


def test_dominance_antisymmetric_and_transitive():
    res = sweep("alpha", [3.0, 6.0, 12.0, 24.0], RunConfig().with_overrides({"grid.n_nodes": 401}))
    D = res.pointwise_order
    assert np.array_equal(D, -D.T)
    n = D.shape[0]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if D[i, j] == 1 and D[j, k] == 1:
                    assert D[i, k] == 1


def test_sweep_records_failures():
    res = sweep("mu", [0.2, -0.5], RunConfig().with_overrides({"grid.n_nodes": 101}))
    assert res.ok == [True, False]
    assert res.solutions[1] is None and "Error" in res.errors[1]


def test_sweep_parallel_matches_serial():
    cfg = RunConfig().with_overrides({"grid.n_nodes": 201})
    a = sweep("a", [0.0, 1e-5, 4e-5], cfg)
    b = sweep("a", [0.0, 1e-5, 4e-5], cfg, workers=3)
    for x, y in zip(a.solutions, b.solutions):
        assert np.array_equal(x.K_bar, y.K_bar)
    assert a.solutions[0].eta == pytest.approx(1.0, abs=1e-12)


def test_theta_short_name_resolution():
    cfg = RunConfig().with_overrides({"revenue.kind": "power"})
    assert sweep("theta", [1e-3], cfg).solutions[0] is not None
    assert cfg.with_overrides({"theta": 0.5}).revenue.nu == 0.5
    assert RunConfig().with_overrides({"theta": 0.5}).cost.theta == 0.5


def test_figures_have_provenance_and_expected_shape():
    f1 = reproduce_figure(1)
    f2 = reproduce_figure(2)
    f3 = reproduce_figure(3)
    f4 = reproduce_figure(4)
    assert set(FIGURES) == {1, 2, 3, 4}
    assert f1.provenance["model.alpha"] == 3.0 and f3.provenance["model.alpha"] == 12.0
    assert f2.column == "u1" and f2.values[-1] < 0
    assert np.all(f3.values > f1.values) and np.all(f4.values < f3.values)
    with pytest.raises(ValueError):
        reproduce_figure(5)


def test_doubling_b_doubles_capital_when_a_zero():
    cfg = RunConfig().with_overrides({**PURE, "revenue.a": 0.0, "grid.n_nodes": 401})
    k1 = solve(cfg.with_overrides({"revenue.b": 1.0})).K_bar
    k2 = solve(cfg.with_overrides({"revenue.b": 2.0})).K_bar
    assert np.allclose(k2, 2 * k1, rtol=1e-13)


@given(gamma=st.floats(0.1, 0.9), nu=st.floats(1e-4, 1.0))
@settings(max_examples=25, deadline=None)
def test_power_eta_strictly_decreasing_in_alpha(gamma, nu):
    cfg = RunConfig().with_overrides({**PURE, "grid.n_nodes": 201})
    params, _, cost, grid = build(cfg)
    f, _ = unit_coefficients(params, cost, grid)
    rev = Power(1.0, gamma, nu)
    etas = [power_eta(a, params, rev, cost, grid, f=f) for a in (0.5, 1, 2, 4, 8, 16)]
    assert np.all(np.diff(etas) < 0)
