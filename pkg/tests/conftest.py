import sys

import numpy as np
import pytest

from popp.builtins import builtin


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_points(name, count, seed=0):
    """Random non-singular sample points for a builtin."""
    s = builtin(name)
    r = np.random.default_rng(seed)
    pts = r.uniform(-1, 1, (count, s.nvars))
    if name == "martinet":
        pts[:, 1] = r.choice([-1, 1], count) * r.uniform(0.1, 2, count)
    return pts


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
