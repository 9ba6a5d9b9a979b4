import numpy as np
import pytest

from vintagecap.config import ConfigError, RunConfig, build, load_config, parse_value
from vintagecap.model import ConstrainedLinQuad, LinPower, Log


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_defaults_are_benchmark(bench_cfg):
    assert bench_cfg.model.alpha == 3.0 and bench_cfg.revenue.a == 4e-5
    assert bench_cfg.cost.q0 == 5.0 and bench_cfg.cost.w == 0.25
    assert bench_cfg.grid.n_nodes == 2001


def test_load_with_comments_and_alias(tmp_path):
    p = write(tmp_path, "# benchmark variant\nmodel.lambda = 0.05  # discount\n"
                        "revenue.kind = log\ncost.kind = 'constrained_lin_quad'\n")
    cfg = load_config(p)
    params, rev, cost, grid = build(cfg)
    assert params.lam == 0.05 and isinstance(rev, Log)
    assert isinstance(cost, ConstrainedLinQuad)


def test_parse_value():
    assert parse_value("3") == 3 and parse_value("1e-3") == 1e-3
    assert parse_value("true") is True and parse_value("none") is None
    assert parse_value('"x"') == "x" and parse_value("lin_quad") == "lin_quad"


def test_all_problems_reported_at_once(tmp_path):
    p = write(tmp_path, "model.mu = -1\nmodel.s_bar = 0\nrevenue.kind = cubic\n"
                        "cost.beta0 = 0\ngrid.n_nodes = 1\nbogus.key = 2\nnot a line\n")
    with pytest.raises(ConfigError) as info:
        load_config(p)
    text = "\n".join(info.value.problems)
    for needle in ("model.mu", "model.s_bar", "revenue.kind", "grid.n_nodes", "bogus.key",
                   "line 7"):
        assert needle in text


def test_negative_discount_beyond_depreciation_rejected(tmp_path):
    p = write(tmp_path, "model.mu = 0.2\nmodel.lambda = -0.4\n")
    with pytest.raises(ConfigError, match="lambda"):
        load_config(p)


def test_cost_constraints_checked_after_build(tmp_path):
    p = write(tmp_path, "cost.kind = lin_power\ncost.p = 1.5\ncost.theta = -1\n")
    with pytest.raises(ConfigError) as info:
        load_config(p)
    assert len(info.value.problems) == 2


def test_tables_are_interpolated(tmp_path):
    (tmp_path / "alpha.csv").write_text("s,alpha\n0,1\n10,3\n")
    (tmp_path / "q1.csv").write_text("0,2\n10,0\n")
    p = write(tmp_path, "model.alpha_table = alpha.csv\ncost.w = none\ncost.q1_table = q1.csv\n"
                        "cost.kind = lin_power\n")
    params, _, cost, grid = build(load_config(p))
    assert isinstance(cost, LinPower)
    assert np.allclose(params.alpha_profile(grid), 1 + 0.2 * grid.nodes)
    assert cost.q1(5.0) == pytest.approx(1.0)


def test_bad_table_reported(tmp_path):
    (tmp_path / "bad.csv").write_text("0,1,2\n")
    p = write(tmp_path, "model.alpha_table = bad.csv\ncost.q1_table = missing.csv\n")
    with pytest.raises(ConfigError) as info:
        load_config(p)
    assert len(info.value.problems) >= 3  # two tables plus w/q1_table exclusivity


def test_profile_csv_header_only_on_first_row(tmp_path):
    from vintagecap.config import read_profile_csv
    from vintagecap.numerics import InputError

    (tmp_path / "ok.csv").write_text("s,v\n0,1\n1,2\n")
    s, v = read_profile_csv(tmp_path / "ok.csv")
    assert s.tolist() == [0.0, 1.0] and v.tolist() == [1.0, 2.0]
    (tmp_path / "bad.csv").write_text("s,v\nx,y\n0,1\n1,2\n")
    with pytest.raises(InputError):
        read_profile_csv(tmp_path / "bad.csv")


def test_with_overrides_short_names():
    cfg = RunConfig().with_overrides({"alpha": 12.0, "lambda": 0.2})
    assert cfg.model.alpha == 12.0 and cfg.model.lam == 0.2
    assert cfg.flat()["model.lambda"] == 0.2
