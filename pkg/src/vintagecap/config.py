"""Run configuration: a flat ``section.key = value`` text document.

Example::

    # benchmark
    model.mu = 0.2
    model.lambda = 0.1
    revenue.kind = quadratic
    cost.q0 = 5

Unset keys take the benchmark values below.  Age profiles may instead be
read from two-column ``s,value`` CSV side files (``model.alpha_table``,
``cost.beta1_table``, ``cost.q1_table``), linearly interpolated in age.
"""
from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import (
    AgeFunction,
    ConstrainedLinQuad,
    LinPower,
    LinQuad,
    Linear,
    Log,
    ModelParams,
    Power,
    PurePower,
    Quadratic,
    exp_decay,
)
from .numerics import AgeGrid, InputError


class ConfigError(ValueError):
    """Every problem found while loading or validating a configuration."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.problems))


@dataclass(frozen=True)
class ModelSection:
    mu: float = 0.2
    lam: float = 0.1
    s_bar: float = 10.0
    alpha: float = 3.0
    alpha_table: str | None = None


@dataclass(frozen=True)
class RevenueSection:
    kind: str = "quadratic"
    a: float = 0.00004
    b: float = 1.0
    gamma: float = 0.5
    nu: float = 0.001


@dataclass(frozen=True)
class CostSection:
    kind: str = "lin_quad"
    beta0: float = 0.5
    beta1: float | None = None  # defaults to beta0
    beta1_table: str | None = None
    q0: float = 5.0
    w: float | None = 0.25  # q1(s) = q0 exp(-w s)
    q1: float | None = None  # constant q1, used when w is unset
    q1_table: str | None = None
    M0: float = 1.0
    M1: float = 1.0
    p: float = 3.0
    theta: float = 0.0


@dataclass(frozen=True)
class GridSection:
    n_nodes: int = 2001
    root_tol: float = 1e-12
    fp_tol: float = 1e-10
    max_iter: int = 500


@dataclass(frozen=True)
class VerifySection:
    tol: float = 1e-8
    # testing hook: shifts the closed-form eta before the soft comparison
    closed_form_perturbation: float = 0.0


@dataclass(frozen=True)
class SimulateSection:
    t_final: float | None = None  # defaults to s_bar
    x0: str = "zero"  # zero | equilibrium | path to s,value CSV
    controls: str | None = None
    stride: int = 0  # 0: choose so that about 100 frames are written


SECTIONS = {
    "model": ModelSection,
    "revenue": RevenueSection,
    "cost": CostSection,
    "grid": GridSection,
    "verify": VerifySection,
    "simulate": SimulateSection,
}
ALIASES = {"model.lambda": "model.lam"}

REVENUE_KINDS = ("quadratic", "log", "power", "pure_power", "linear")
COST_KINDS = ("lin_quad", "constrained_lin_quad", "lin_power")

# short names accepted by sweeps
SWEEP_PARAMS = {
    "alpha": "model.alpha",
    "mu": "model.mu",
    "lambda": "model.lam",
    "s_bar": "model.s_bar",
    "beta0": "cost.beta0",
    "q0": "cost.q0",
    "w": "cost.w",
    "a": "revenue.a",
    "b": "revenue.b",
    "gamma": "revenue.gamma",
    "theta": None,  # revenue.nu for power revenue, cost.theta otherwise
}


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    revenue: RevenueSection = field(default_factory=RevenueSection)
    cost: CostSection = field(default_factory=CostSection)
    grid: GridSection = field(default_factory=GridSection)
    verify: VerifySection = field(default_factory=VerifySection)
    simulate: SimulateSection = field(default_factory=SimulateSection)
    base_dir: str = "."

    def get(self, key: str):
        section, name = _split(key)
        return getattr(getattr(self, section), name)

    def with_overrides(self, overrides: dict | None = None, **kw) -> "RunConfig":
        """Copy with dotted keys (or sweep short names) replaced."""
        items = dict(overrides or {})
        items.update(kw)
        cfg = self
        for key, value in items.items():
            key = resolve_param(key, cfg)
            section, name = _split(key)
            sec = dataclasses.replace(getattr(cfg, section), **{name: value})
            cfg = dataclasses.replace(cfg, **{section: sec})
        return cfg

    def flat(self) -> dict:
        out = {}
        for section in SECTIONS:
            for f in dataclasses.fields(getattr(self, section)):
                name = "lambda" if (section, f.name) == ("model", "lam") else f.name
                out[f"{section}.{name}"] = getattr(getattr(self, section), f.name)
        return out


def _split(key: str) -> tuple[str, str]:
    key = ALIASES.get(key, key)
    section, _, name = key.partition(".")
    if section not in SECTIONS or name not in {
        f.name for f in dataclasses.fields(SECTIONS[section])
    }:
        raise KeyError(key)
    return section, name


def resolve_param(name: str, cfg: RunConfig) -> str:
    if name == "theta":
        return "revenue.nu" if cfg.revenue.kind == "power" else "cost.theta"
    if name in SWEEP_PARAMS:
        return SWEEP_PARAMS[name]
    return ALIASES.get(name, name)


def parse_value(text: str):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null", ""):
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _coerce(section_cls, name, value, problems, key):
    ftype = {f.name: f.type for f in dataclasses.fields(section_cls)}[name]
    if value is None:
        if "None" in str(ftype):
            return None
        problems.append(f"{key}: a value is required")
        return None
    if "float" in str(ftype):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            problems.append(f"{key}: expected a number, got {value!r}")
            return None
        return float(value)
    if "int" in str(ftype):
        if isinstance(value, bool) or not isinstance(value, int):
            problems.append(f"{key}: expected an integer, got {value!r}")
            return None
        return value
    if "bool" in str(ftype):
        if not isinstance(value, bool):
            problems.append(f"{key}: expected true/false, got {value!r}")
        return value
    return str(value)


def config_from_mapping(mapping: dict, base_dir: str = ".") -> RunConfig:
    problems = []
    per_section: dict[str, dict] = {s: {} for s in SECTIONS}
    for key, value in mapping.items():
        try:
            section, name = _split(key)
        except KeyError:
            problems.append(f"{key}: unknown key")
            continue
        coerced = _coerce(SECTIONS[section], name, value, problems, key)
        if coerced is not None or value is None:
            per_section[section][name] = coerced
    cfg = RunConfig(
        **{s: SECTIONS[s](**vals) for s, vals in per_section.items()}, base_dir=base_dir
    )
    problems += validate(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    problems = []
    mapping = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            problems.append(f"line {lineno}: expected 'key = value', got {raw!r}")
            continue
        mapping[key.strip()] = parse_value(value)
    try:
        cfg = config_from_mapping(mapping, base_dir=str(path.parent))
    except ConfigError as exc:
        problems += exc.problems
        cfg = None
    if problems:
        raise ConfigError(problems)
    return cfg


def read_profile_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column ``s,value`` table; a non-numeric first row is a header."""
    rows = []
    first = True
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise InputError(f"{path}: row {i + 1} has {len(row)} columns, expected 2")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if not first:
                    raise InputError(f"{path}: row {i + 1} is not numeric") from None
            first = False
    if len(rows) < 2:
        raise InputError(f"{path}: need at least two rows")
    arr = np.array(rows)
    if not np.all(np.isfinite(arr)) or np.any(np.diff(arr[:, 0]) <= 0):
        raise InputError(f"{path}: ages must be finite and strictly increasing")
    return arr[:, 0], arr[:, 1]


def _table(cfg: RunConfig, rel: str) -> AgeFunction:
    p = Path(rel)
    if not p.is_absolute():
        p = Path(cfg.base_dir) / p
    return AgeFunction.of(read_profile_csv(p))


def build(cfg: RunConfig):
    """``(params, revenue, cost, grid)`` for a validated configuration."""
    m, r, c, g = cfg.model, cfg.revenue, cfg.cost, cfg.grid
    alpha = _table(cfg, m.alpha_table) if m.alpha_table else m.alpha
    params = ModelParams(mu=m.mu, lam=m.lam, s_bar=m.s_bar, alpha=alpha)

    revenue = {
        "quadratic": lambda: Quadratic(a=r.a, b=r.b),
        "log": lambda: Log(),
        "power": lambda: Power(b=r.b, gamma=r.gamma, nu=r.nu),
        "pure_power": lambda: PurePower(b=r.b, gamma=r.gamma),
        "linear": lambda: Linear(b=r.b),
    }[r.kind]()

    if c.beta1_table:
        beta1 = _table(cfg, c.beta1_table)
    else:
        beta1 = c.beta0 if c.beta1 is None else c.beta1
    if c.q1_table:
        q1 = _table(cfg, c.q1_table)
    elif c.w is not None:
        q1 = exp_decay(c.q0, c.w)
    else:
        q1 = 0.0 if c.q1 is None else c.q1
    common = dict(beta0=c.beta0, beta1=beta1, q0=c.q0, q1=q1)
    if c.kind == "lin_quad":
        cost = LinQuad(**common)
    elif c.kind == "constrained_lin_quad":
        cost = ConstrainedLinQuad(**common, M0=c.M0, M1=c.M1)
    else:
        cost = LinPower(**common, p=c.p, theta=c.theta)
    return params, revenue, cost, AgeGrid(m.s_bar, g.n_nodes)


def validate(cfg: RunConfig) -> list[str]:
    """All constraint violations, not just the first."""
    problems = []
    m, r, c, g = cfg.model, cfg.revenue, cfg.cost, cfg.grid
    kinds_ok = True
    if r.kind not in REVENUE_KINDS:
        problems.append(f"revenue.kind must be one of {REVENUE_KINDS}, got {r.kind!r}")
        kinds_ok = False
    if c.kind not in COST_KINDS:
        problems.append(f"cost.kind must be one of {COST_KINDS}, got {c.kind!r}")
        kinds_ok = False
    grid_ok = isinstance(g.n_nodes, int) and g.n_nodes >= 2
    if not grid_ok:
        problems.append(f"grid.n_nodes must be an integer >= 2, got {g.n_nodes}")
    for name in ("root_tol", "fp_tol"):
        v = getattr(g, name)
        if v is None or not v > 0:
            problems.append(f"grid.{name} must be > 0, got {v}")
    if not (isinstance(g.max_iter, int) and g.max_iter >= 1):
        problems.append(f"grid.max_iter must be a positive integer, got {g.max_iter}")
    if cfg.verify.tol is None or not cfg.verify.tol > 0:
        problems.append(f"verify.tol must be > 0, got {cfg.verify.tol}")
    if c.w is not None and c.q1_table:
        problems.append("cost.w and cost.q1_table are mutually exclusive")
    missing = [k for k, v in (("model.mu", m.mu), ("model.lambda", m.lam),
                              ("model.s_bar", m.s_bar), ("model.alpha", m.alpha),
                              ("cost.beta0", c.beta0), ("cost.q0", c.q0)) if v is None]
    for key in missing:
        problems.append(f"{key}: a value is required")

    tables_ok = True
    for key, rel in (("model.alpha_table", m.alpha_table),
                     ("cost.beta1_table", c.beta1_table), ("cost.q1_table", c.q1_table)):
        if rel:
            try:
                _table(cfg, rel)
            except (OSError, InputError) as exc:
                problems.append(f"{key}: {exc}")
                tables_ok = False
    if missing or not tables_ok:
        return problems

    s_bar_ok = math.isfinite(m.s_bar) and m.s_bar > 0
    if kinds_ok and grid_ok and s_bar_ok:
        params, revenue, cost, grid = build(cfg)
        problems += params.problems()
        problems += revenue.problems()
        problems += cost.problems(grid)
    else:
        problems += ModelParams(m.mu, m.lam, m.s_bar, m.alpha).problems()
    return problems
