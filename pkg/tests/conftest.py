import math
import sys

import pytest
from hypothesis import settings

from halfline_gabor.windows import (
    CauchyFourier,
    OneSidedExponential,
    TruncatedExponential,
    TruncatedLinear,
)

settings.register_profile("repo", max_examples=60, deadline=None)
settings.load_profile("repo")

E = math.e


def builtin_windows():
    return [
        OneSidedExponential(1.0),
        OneSidedExponential(2.5),
        TruncatedLinear(1.0),
        TruncatedExponential(1.0, 1.0),
        CauchyFourier(((1.0, 1.0), (0.5, 2.0))),
    ]


@pytest.fixture
def exp_window():
    return OneSidedExponential(1.0)


@pytest.fixture
def linear_window():
    return TruncatedLinear(1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
