import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nonlocal_sentiment import core, dynamics  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # JIT compilation (or cache load) happens once, outside any timed test.
    w = core.OffsetWeights.zeros(2)
    dynamics.euler_step(np.zeros((2, 2)), w, 0.1)
    dynamics.nonlocal_term(np.zeros((2, 2)), w)


@pytest.fixture
def kernel16():
    """16 surveyed plus 15 outside individuals, seed 7."""
    return core.gen_kernel(16, 15, 1.0, 1.7, core.make_rng(7))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
