import sys
import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("qop", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("qop")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_SESSION = {}


def pytest_sessionstart(session):
    import time

    _SESSION["start"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    import time

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for row in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_line(*row))
    elapsed = time.perf_counter() - _SESSION["start"]
    terminalreporter.write_line(f"full suite wall time {elapsed:.1f} s (budget 120 s): "
                                f"{'PASS' if elapsed < 120 else 'FAIL'}")
