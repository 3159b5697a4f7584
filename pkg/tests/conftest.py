import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> list of (outcome, detail) across its tests
_CRITERIA: dict[int, list[tuple[str, str]]] = {}


@pytest.fixture
def detail(request):
    """Append a human-readable measurement to the test's acceptance line."""

    def add(text: str) -> None:
        request.node.user_properties.append(("detail", text))

    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    failed_setup = report.when == "setup" and not report.passed
    if report.when != "call" and not failed_setup:
        return
    n = marker.args[0]
    if report.skipped:
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
        status, text = "SKIP", reason.removeprefix("Skipped: ")
    else:
        status = "PASS" if report.passed else "FAIL"
        text = "; ".join(v for k, v in item.user_properties if k == "detail")
    _CRITERIA.setdefault(n, []).append((status, text))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _CRITERIA[n]
        statuses = {s for s, _ in results}
        overall = "FAIL" if "FAIL" in statuses else "PASS" if "PASS" in statuses else "SKIP"
        details = " | ".join(t for _, t in results if t)
        terminalreporter.write_line(f"criterion {n:>2}: {overall}  {details}")
