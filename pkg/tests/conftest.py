import pytest

from mbsched.traffic import constant, random_normal
from mbsched.workloads import build_workload


@pytest.fixture
def lr1s():
    return build_workload("LR1S")


def light_traffic(workload, seed=0, rate=1000):
    return random_normal(rate, workload.row_bytes, seed=seed)


def steady_traffic(workload, seed=0, rate=1000):
    return constant(rate, workload.row_bytes, seed=seed)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
