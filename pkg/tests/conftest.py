from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from weilgeom.riemann import Metric

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_rationals = rationals.filter(lambda q: q != 0)


def rational_vector(n):
    return st.lists(rationals, min_size=n, max_size=n)


def symmetric_matrix(n):
    return st.lists(rationals, min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(
        lambda flat: _unflatten(flat, n))


def _unflatten(flat, n):
    m = [[Fraction(0)] * n for _ in range(n)]
    it = iter(flat)
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = next(it)
    return m


@pytest.fixture
def flat2():
    return Metric.euclidean(["x", "y"])


@pytest.fixture
def hyperbolic():
    return Metric.diagonal(["x", "y"], ["1/y^2", "1/y^2"])


@pytest.fixture
def sphere():
    return Metric.diagonal(["x", "y"], ["4/(1 + x^2 + y^2)^2"] * 2)


@pytest.fixture
def skew():
    return Metric.from_strings(["x", "y"], {(0, 0): "2 + x^2", (0, 1): "x*y", (1, 1): "3 + y"})


# acceptance criteria record their verdicts here; printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {text}")
