import json
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def frozen():
    """Results of tests/oracles/build_frozen.py (independent of the package)."""
    return json.loads((DATA / "frozen.json").read_text())


# -- one summary line per acceptance criterion -----------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed or rep.skipped):
        return
    n, title = mark.args
    state = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    prev = _CRITERIA.get(n, ("PASS", title))[0]
    worst = max(prev, state, key=["PASS", "SKIP", "FAIL"].index)
    _CRITERIA[n] = (worst, title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        state, title = _CRITERIA[n]
        terminalreporter.write_line("criterion %2d: %s  %s" % (n, state, title))
