from __future__ import annotations

import pytest

from oqb import fixtures

# nodeid -> criterion number; populated at collection, reported at exit
_BY_NODEID: dict[str, int] = {}
_TEXTS: dict[int, str] = {}
_RESULTS: dict[int, bool] = {}


@pytest.fixture(scope="session")
def catalog():
    return fixtures.sensor_ontology()


@pytest.fixture(scope="session")
def data():
    return fixtures.registry()


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, text): acceptance criterion the test enforces"
    )


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            num, text = marker.args
            _BY_NODEID[item.nodeid] = num
            _TEXTS[num] = text
            _RESULTS.setdefault(num, True)


def pytest_runtest_logreport(report):
    num = _BY_NODEID.get(report.nodeid)
    if num is None:
        return
    if report.when == "call":
        _RESULTS[num] = _RESULTS[num] and report.passed
    elif report.failed:
        _RESULTS[num] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        verdict = "PASS" if _RESULTS[num] else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict} - {_TEXTS[num]}")
