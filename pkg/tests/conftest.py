import numpy as np
import pytest

from graphon_sampling.gsp import Graph


def random_graph(rng: np.random.Generator, n: int, density: float | None = None) -> Graph:
    """Symmetric weighted adjacency with entries in [0, 1], self-loops allowed."""
    a = rng.uniform(0, 1, (n, n))
    if density is not None:
        a = a * (rng.uniform(0, 1, (n, n)) < density)
    a = np.triu(a)
    return Graph(a + np.triu(a, 1).T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def k2():
    return Graph(np.array([[0.0, 1.0], [1.0, 0.0]]))


@pytest.fixture
def k3():
    return Graph(np.ones((3, 3)) - np.eye(3))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
