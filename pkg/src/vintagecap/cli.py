"""Command line entry point: ``vintagecap <command> --config PATH --out DIR``.

Exit codes: 0 success, 2 configuration or input error, 3 solver failure,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import numerics as nm
from .config import ConfigError, RunConfig, build, load_config, read_profile_csv
from .dynamics import TabulatedControl, convergence_probe, equilibrium_control, simulate
from .equilibrium import lq_coefficients, lq_profiles, solve_equilibrium
from .model import LinQuad, ModelError
from .sensitivity import FIGURES, reproduce_figure, sweep
from .verify import run_checks

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4
log = logging.getLogger("vintagecap")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


def write_csv(path: Path, header, rows, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def cmd_equilibrium(cfg: RunConfig, out: Path) -> int:
    params, revenue, cost, grid = build(cfg)
    sol = solve_equilibrium(params, revenue, cost, grid, cfg.grid.root_tol)
    write_csv(out / "equilibrium.csv", ["s", "K", "u1", "zeta"],
              zip(grid.nodes, sol.K_bar, sol.u1_bar, sol.zeta_bar))
    scalars = [("eta", sol.eta), ("Q_star", sol.Q_star), ("u0", sol.u0_bar)]
    if type(cost) is LinQuad:
        w1, w2 = lq_profiles(params, cost, grid)
        c1, c2 = lq_coefficients(w1, w2, params, grid)
        scalars += [("c1", c1), ("c2", c2)]
    r = sol.residuals
    scalars += [("r_T", r.r_T), ("r_zeta", r.r_zeta), ("r_u0", r.r_u0), ("r_u1", r.r_u1),
                ("theta_at_eta", r.theta_at_eta), ("nonneg", sol.nonneg),
                ("min_K", sol.min_K)]
    write_csv(out / "scalars.csv", ["name", "value"], scalars)
    return EXIT_OK


def _read_x0(source: str, cfg: RunConfig, grid, sol) -> np.ndarray:
    if source == "zero":
        return np.zeros(grid.n_nodes)
    if source == "equilibrium":
        return sol.K_bar.copy()
    path = Path(source)
    if not path.is_absolute():
        path = Path(cfg.base_dir) / path
    s, v = read_profile_csv(path)
    if s.size != grid.n_nodes or np.max(np.abs(s - grid.nodes)) > 1e-9 * grid.s_bar:
        raise nm.InputError(
            f"{path}: initial profile must list the {grid.n_nodes} grid ages, got {s.size} rows"
        )
    return v


def _read_controls(path: Path, grid) -> TabulatedControl:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, body = rows[0], rows[1:]
    width = 2 + grid.n_nodes
    if len(header) != width or any(len(r) != width for r in body):
        raise nm.InputError(f"{path}: expected {width} columns (tau, u0, u1 at each node)")
    data = np.array(body, dtype=float)
    return TabulatedControl(data[:, 0], data[:, 1], data[:, 2:])


def cmd_simulate(cfg: RunConfig, out: Path, t_final=None, x0=None, controls=None,
                 stride=None) -> int:
    params, revenue, cost, grid = build(cfg)
    sim = cfg.simulate
    t_final = sim.t_final if t_final is None else t_final
    t_final = params.s_bar if t_final is None else t_final
    sol = solve_equilibrium(params, revenue, cost, grid, cfg.grid.root_tol)
    x0_values = _read_x0(sim.x0 if x0 is None else x0, cfg, grid, sol)
    controls = sim.controls if controls is None else controls
    if controls:
        path = Path(controls)
        if not path.is_absolute():
            path = Path(cfg.base_dir) / path
        traj = simulate(x0_values, _read_controls(path, grid), params, grid, t_final)
        diff = traj.frames - sol.K_bar
        from .dynamics import primitive_weak_norm
        times, sup = traj.times, np.max(np.abs(diff), axis=1)
        weak = np.array([primitive_weak_norm(d, grid) for d in diff])
    else:
        probe = convergence_probe(x0_values, sol, params, grid, max(t_final, params.s_bar))
        keep = probe.times <= t_final + 1e-9 * max(1.0, t_final)
        if not np.isclose(probe.times[keep][-1], t_final, rtol=0, atol=1e-9 * max(1, t_final)):
            raise nm.InputError(f"t_final = {t_final} is not a multiple of ds = {grid.ds}")
        times, sup, weak = probe.times[keep], probe.sup_error[keep], probe.weak_error[keep]
        traj = probe.trajectory
    stride = sim.stride if stride is None else stride
    if stride <= 0:
        stride = max(1, math.ceil((times.size - 1) / 100))
    picks = list(range(0, times.size, stride))
    if picks[-1] != times.size - 1:
        picks.append(times.size - 1)
    s = grid.nodes
    write_csv(out / "trajectory.csv", ["tau", "s", "K"],
              ((times[j], s[i], traj.frames[j, i]) for j in picks for i in range(s.size)))
    write_csv(out / "convergence.csv", ["tau", "sup_error", "weak_error"],
              zip(times, sup, weak))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path, param: str, start: float, stop: float,
              steps: int, workers: int = 1) -> int:
    if steps < 2:
        raise nm.InputError("steps must be >= 2")
    values = np.linspace(start, stop, steps)
    res = sweep(param, values, cfg, workers=workers)
    n = cfg.grid.n_nodes
    header = ["param_value", "status", "eta", "Q_star"] + [f"K_{i}" for i in range(n)]
    rows = []
    for v, sol, err in zip(res.param_values, res.solutions, res.errors):
        if sol is None:
            rows.append([v, err, None, None] + [None] * n)
        else:
            rows.append([v, "ok", sol.eta, sol.Q_star] + list(sol.K_bar))
    write_csv(out / "sweep.csv", header, rows)
    order = res.pointwise_order
    write_csv(out / "dominance.csv", ["i", "j", "value_i", "value_j", "order"],
              ((i, j, values[i], values[j], order[i, j])
               for i in range(len(values)) for j in range(len(values)) if i != j))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path, tol=None) -> int:
    checks = run_checks(cfg, tol)
    write_csv(out / "verify.csv", ["check", "kind", "passed", "value", "threshold", "note"],
              ((c.name, "hard" if c.hard else "soft", c.passed, c.value, c.threshold, c.note)
               for c in checks))
    for c in checks:
        if not c.passed:
            level = logging.ERROR if c.hard else logging.WARNING
            log.log(level, "%s check %s failed: %s > %s %s", "hard" if c.hard else "soft",
                    c.name, c.value, c.threshold, c.note)
    return EXIT_OK if all(c.passed for c in checks if c.hard) else EXIT_VERIFY


def cmd_figures(cfg: RunConfig, out: Path) -> int:
    for fig in sorted(FIGURES):
        series = reproduce_figure(fig, cfg)
        note = f"figure={fig} " + " ".join(f"{k}={fmt(v)}" for k, v in series.provenance.items())
        write_csv(out / f"fig{fig}.csv", ["s", series.column],
                  zip(series.s, series.values), comment=note)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vintagecap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="key = value file; benchmark if omitted")
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a configuration key")
        return p

    common(sub.add_parser("equilibrium", help="solve for the equilibrium distribution"))
    p = common(sub.add_parser("simulate", help="transport dynamics toward equilibrium"))
    p.add_argument("--t-final", type=float)
    p.add_argument("--x0", help="zero | equilibrium | path to s,value CSV")
    p.add_argument("--controls", help="CSV with columns tau,u0,u1 at every node")
    p.add_argument("--stride", type=int, help="write every n-th frame (0 = about 100 frames)")
    p = common(sub.add_parser("sweep", help="equilibria along one parameter"))
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p = common(sub.add_parser("verify", help="run the invariant battery"))
    p.add_argument("--tol", type=float)
    common(sub.add_parser("figures", help="series for the four benchmark figures"))
    return parser


def _load(args) -> RunConfig:
    from .config import config_from_mapping, parse_value

    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig()
    if args.set:
        mapping = {k: v for k, v in cfg.flat().items()}
        for item in args.set:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError([f"--set {item!r}: expected KEY=VALUE"])
            mapping[key.strip()] = parse_value(value)
        cfg = config_from_mapping(mapping, base_dir=cfg.base_dir)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        args.out.mkdir(parents=True, exist_ok=True)
        if args.command == "equilibrium":
            return cmd_equilibrium(cfg, args.out)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out, args.t_final, args.x0, args.controls,
                                args.stride)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out, args.param, args.start, args.stop, args.steps,
                             args.workers)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, args.tol)
        if args.command == "figures":
            return cmd_figures(cfg, args.out)
    except (ConfigError, nm.InputError, ModelError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except nm.NumericsError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
