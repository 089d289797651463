import pytest

from wtsim.machine import CostModel
from wtsim.workload import WorkloadSpec

ACCEPTANCE_LINES = []


@pytest.fixture
def m1():
    # desk model: big is fast and hungry, little is slow and frugal
    return CostModel(
        configs=("big", "little"),
        rmax="big",
        tau={"big": {"f": 3}, "little": {"f": 5}},
        gamma={"big": {"f": 10}, "little": {"f": 4}},
        delta=1,
        theta=2,
    )


@pytest.fixture
def w1():
    return WorkloadSpec.of([("f", 4), ("f", 4)])


@pytest.fixture
def w2():
    return WorkloadSpec.of([("f", 8), ("f", 8)])


@pytest.fixture
def report():
    def record(criterion, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
