import random

import pytest

from subspace_approx import ConstructionParams

ACCEPTANCE_LINES: list[str] = []


def params_for(d, q, alpha, M=4, **kw):
    return ConstructionParams(d=d, q=q, theta=5, alpha=alpha, M=M, **kw)


def random_frame(rng: random.Random, n: int, g: int, lo=-5, hi=5):
    """Random integer frame of full rank g in Z^n (rows are vectors)."""
    from subspace_approx.exterior import integer_rank

    while True:
        V = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(g)]
        if integer_rank(V) == g:
            return V


@pytest.fixture(scope="session")
def p11():
    return params_for(1, 1, 4)


@pytest.fixture(scope="session")
def p12():
    return params_for(1, 2, 4, M=6)


@pytest.fixture(scope="session")
def p21():
    return params_for(2, 1, 10)


@pytest.fixture
def report_criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
