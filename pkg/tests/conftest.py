import pytest

_CRITERIA = {}
_SETUP_TIME = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when == "teardown":
        return
    number, title = marker.args
    if report.when == "setup" and report.passed:
        # session fixtures shared by several criteria run here
        _SETUP_TIME[item.nodeid] = report.duration
        return
    detail = dict(item.user_properties).get("detail", "")
    status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
    duration = report.duration + _SETUP_TIME.get(item.nodeid, 0.0)
    _CRITERIA[number] = (title, status, detail, duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, detail, duration = _CRITERIA[number]
        line = f"[{status}] criterion {number:2d}: {title} ({duration:.1f}s)"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
