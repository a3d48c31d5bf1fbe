import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance criterion number -> (title, passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    # criteria whose test raised before recording still get a FAIL line
    for rep in terminalreporter.stats.get("failed", []) + terminalreporter.stats.get("error", []):
        m = re.search(r"test_acceptance\.py::test_(\d+)_(\w+)", rep.nodeid)
        if m and int(m.group(1)) not in ACCEPTANCE:
            ACCEPTANCE[int(m.group(1))] = (m.group(2).replace("_", " "), False, "raised before completing")
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record one acceptance line; the test still asserts on its own."""

    def record(num, title, ok, detail):
        ACCEPTANCE[num] = (title, bool(ok), detail)
        return ok

    return record
