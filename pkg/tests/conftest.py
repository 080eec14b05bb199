import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from interpconst.geometry import make_triangle  # noqa: E402

TABLE1 = {
    # (a, b): (lambda_low, lambda_upper, C_low, C_upper)
    (0.0, 1.0): (14.8181, 15.1101, 0.2571, 0.2598),
    (0.0, math.sqrt(3) / 3): (21.4906, 22.1234, 0.2125, 0.2158),
    (0.5, math.sqrt(3) / 2): (31.6764, 32.2821, 0.1759, 0.1777),
    (-0.5, math.sqrt(3) / 2): (5.15806, 5.26263, 0.4358, 0.4404),
}
TABLE_TRIANGLES = list(TABLE1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=TABLE_TRIANGLES, ids=["right", "30-60-90", "regular", "obtuse"])
def table_triangle(request):
    return make_triangle(*request.param)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
