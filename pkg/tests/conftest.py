from __future__ import annotations

import pytest

from locald.graph import Configuration, IdAssignment, build_graph, cycle_graph, path_graph

CRITERIA: list[str] = []


def record(number: int, ok: bool, note: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {note}"
    CRITERIA.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def path3() -> Configuration:
    return Configuration(path_graph(3), ("0", "1", "0"))


@pytest.fixture
def c6() -> Configuration:
    return Configuration(cycle_graph(6), ("0", "1") * 3)


@pytest.fixture
def ids3() -> IdAssignment:
    return IdAssignment.sequential(3)


@pytest.fixture
def named_edge() -> Configuration:
    return Configuration(build_graph([("a", "b")]), ("0", "1"))
