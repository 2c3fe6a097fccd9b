import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lipfree import generators as gen
from lipfree.metric_core import MetricSpace

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def spaces(draw, min_points=1, max_points=8, pointed=True, kinds=("graph", "euclidean", "ultra")):
    """Random valid spaces drawn through the seeded generators."""
    seed = draw(st.integers(0, 2**31 - 1))
    n = draw(st.integers(min_points, max_points))
    kind = draw(st.sampled_from(kinds))
    return gen.random_space(gen.rng_for(seed, "hyp"), n, pointed=pointed, kind=kind)


def values_for(X: MetricSpace, lo=-5.0, hi=5.0):
    return st.lists(
        st.floats(lo, hi, allow_nan=False, allow_infinity=False), min_size=X.n, max_size=X.n
    ).map(np.array)


@pytest.fixture
def rng():
    return gen.rng_for(12345, "tests")


def brute_lipschitz(values, d):
    """Reference Lipschitz number by a plain double loop."""
    n = len(values)
    best = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                best = max(best, abs(values[i] - values[j]) / d[i][j])
    return best


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
