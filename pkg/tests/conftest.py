import itertools

import pytest
from hypothesis import HealthCheck, settings

from localcolor.graph import Graph
from localcolor.primitives import linial_coloring
from localcolor.recursion import Context
from localcolor.sim import SimConfig

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def complete(n):
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def make_context(g, theta, eps_policy="auto"):
    lin = linial_coloring(g, SimConfig(ids={v: v for v in g.nodes}))
    return Context(delta=g.delta, theta=theta, qcoloring=lin.colors, q=lin.num_colors, eps_policy=eps_policy)


@pytest.fixture
def k4():
    return complete(4)


def pytest_terminal_summary(terminalreporter):
    import sys

    lines = getattr(sys.modules.get("test_acceptance"), "CRITERIA_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
