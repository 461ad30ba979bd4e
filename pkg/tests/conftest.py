import numpy as np
import pytest

from kgcn.graph import WeightedGraph, generate_ba, generate_er


def path3(weights=(0.5, 0.6, 0.4)):
    return WeightedGraph.from_edges(3, [(0, 1), (1, 2)], weights)


def triangle(weights=(1.0, 1.0, 1.0)):
    return WeightedGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)], weights)


def random_graph(rng, n_max=12, n_min=1):
    """A small ER or BA graph with random size and density."""
    n = int(rng.integers(n_min, n_max + 1))
    if n >= 3 and rng.random() < 0.5:
        return generate_ba(n, int(rng.integers(1, min(4, n - 1) + 1)), rng)
    return generate_er(n, float(rng.uniform(0.05, 0.7)), rng)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """``criterion(label, ok, detail)`` records a pass/fail line and asserts ``ok``."""
    def check(label, ok, detail=""):
        ACCEPTANCE.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"
    return check


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
