import numpy as np
import pytest

from caperc.model import ColoredMultigraph


@pytest.fixture
def tiny_graph():
    """Three colors on four vertices; every pair appears in at most two layers."""
    return ColoredMultigraph.from_edges(4, [[(0, 1), (2, 3)], [(1, 2), (0, 1)], [(0, 3)]])


def random_colored(rng: np.random.Generator, n: int, k: int, p: float) -> ColoredMultigraph:
    iu, iv = np.triu_indices(n, 1)
    layers = []
    for _ in range(k):
        keep = rng.random(len(iu)) < p
        layers.append(np.column_stack((iu[keep], iv[keep])))
    return ColoredMultigraph(n, k, tuple(layers))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the terminal summary, then return the verdict."""

    def record(number: int, name: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
