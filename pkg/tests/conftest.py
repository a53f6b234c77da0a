import pytest

_outcomes: dict[object, tuple[str, bool, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    ok = report.passed
    prev = _outcomes.get(number)
    if prev is not None:
        ok = ok and prev[1]
    _outcomes[number] = (title, ok, report.duration + (prev[2] if prev else 0.0))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_outcomes, key=lambda k: (not isinstance(k, int), str(k) if not isinstance(k, int) else k)):
        title, ok, seconds = _outcomes[key]
        label = f"criterion {key:>2}" if isinstance(key, int) else f"{key:<12}"
        terminalreporter.write_line(f"{label} {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.1f} s)")
