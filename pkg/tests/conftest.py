import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    n = marker.args[0]
    detail = getattr(item, "criterion_detail", "")
    ok = report.passed and _CRITERIA.get(n, (True, ""))[0]
    _CRITERIA[n] = (ok, "; ".join(filter(None, [_CRITERIA.get(n, (True, ""))[1], detail])))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record(request):
    """Attach a short result summary to the current acceptance test."""

    def _record(text):
        request.node.criterion_detail = (
            f"{request.node.criterion_detail}; {text}" if getattr(request.node, "criterion_detail", "") else text
        )

    return _record
