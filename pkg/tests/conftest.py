import numpy as np
import pytest

from vintagecap import (
    AgeGrid,
    ConstrainedLinQuad,
    LinPower,
    LinQuad,
    Log,
    ModelParams,
    Power,
    PurePower,
    Quadratic,
    RunConfig,
    build,
)
from vintagecap.model import exp_decay

BENCH_Q1 = exp_decay(5.0, 0.25)

REVENUES = {
    "quadratic": Quadratic(a=4e-5, b=1.0),
    "log": Log(),
    "power": Power(b=1.0, gamma=0.5, nu=1e-3),
    "pure_power": PurePower(b=1.0, gamma=0.5),
}
COSTS = {
    "lin_quad": LinQuad(0.5, 0.5, 5.0, BENCH_Q1),
    "constrained": ConstrainedLinQuad(0.5, 0.5, 5.0, BENCH_Q1, M0=1.0, M1=1.0),
    "lin_power": LinPower(0.5, 0.5, 5.0, BENCH_Q1, p=3.0, theta=0.1),
}
MATRIX = [(r, c) for r in REVENUES for c in COSTS]


@pytest.fixture(scope="session")
def bench_cfg():
    return RunConfig()


@pytest.fixture(scope="session")
def bench(bench_cfg):
    return build(bench_cfg)


@pytest.fixture(scope="session")
def params():
    return ModelParams(0.2, 0.1, 10.0, 3.0)


@pytest.fixture(scope="session")
def grid():
    return AgeGrid(10.0, 2001)


def sup(x):
    return float(np.max(np.abs(x)))


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: dict[str, str] = {}


def record(criterion: str, passed: bool, detail: str) -> bool:
    ACCEPTANCE[criterion] = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE[criterion])
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int("".join(c for c in k if c.isdigit()))):
        terminalreporter.write_line(ACCEPTANCE[key])
