import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20150501)


@pytest.fixture
def pair(rng):
    f1 = rng.random((32, 32))
    f2 = 0.8 * f1 + 0.1 + 0.1 * rng.standard_normal((32, 32))
    return f1, f2


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, title, detail in sorted(results):
        terminalreporter.write_line(f"[{status}] AC{number:02d} {title}: {detail}")
