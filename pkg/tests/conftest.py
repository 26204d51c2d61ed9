import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _ACCEPTANCE[number] = (title, rep.passed, rep.duration)
    line = f"ACCEPTANCE {number} {'PASS' if rep.passed else 'FAIL'}: {title} ({rep.duration:.2f}s)"
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line("")
        reporter.write_line(line)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, secs = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{number}. {'PASS' if ok else 'FAIL'}  {title} ({secs:.2f}s)")
