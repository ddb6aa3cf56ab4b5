import numpy as np
import pytest

from lpimager import Box, LpProblem, ObjectiveFrame, generate


def unit_square_problem(c=(0.0, 1.0)) -> LpProblem:
    A = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
    return LpProblem(A, [1.0, 0.0, 1.0, 0.0], c)


UNIT_BOX = Box([0.0, 0.0], [1.0, 1.0])


@pytest.fixture
def unit_square():
    return unit_square_problem()


@pytest.fixture
def unit_frame(unit_square):
    return ObjectiveFrame(unit_square.c, [0.0, 2.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture(scope="session")
def small_bundle():
    return generate(4, 30, seed=3)


def same_bits(a, b) -> bool:
    a = np.ascontiguousarray(a, dtype="<f8")
    b = np.ascontiguousarray(b, dtype="<f8")
    return a.shape == b.shape and a.tobytes() == b.tobytes()


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in module.RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
