import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from inducedpaths import Graph  # noqa: E402


def cycle(n):
    return Graph.from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return Graph.from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return Graph.from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves):
    return Graph.from_edge_list(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


@pytest.fixture
def k3():
    return complete(3)


@pytest.fixture
def c4():
    return cycle(4)


@pytest.fixture
def p4():
    return path_graph(4)


# acceptance report: one line per criterion, printed after the run


def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture
def acceptance(request):
    lines = request.config._acceptance_lines

    def record(criterion: int, ok: bool, detail: str) -> None:
        lines[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(lines[criterion])

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
