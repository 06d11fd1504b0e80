import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        key = marker.args[0]
        passed = report.outcome == "passed"
        notes = [v for k, v in report.user_properties if k == "audit"]
        _RESULTS[key] = (marker.args[1], passed, notes)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS, key=lambda k: (isinstance(k, str), k)):
        title, passed, notes = _RESULTS[key]
        label = f"criterion {key}" if isinstance(key, int) else key
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {title}")
        for note in notes:
            for line in str(note).splitlines():
                terminalreporter.write_line(f"      {line}")
