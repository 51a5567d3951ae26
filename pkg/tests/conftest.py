import pytest

_OUTCOMES: dict[int, list[tuple[str, str, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        detail = getattr(item, "criterion_detail", "")
        _OUTCOMES.setdefault(number, []).append(("FAIL" if failed else "PASS", title, detail))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        entries = _OUTCOMES[number]
        status = "FAIL" if any(e[0] == "FAIL" for e in entries) else "PASS"
        details = "; ".join(e[2] for e in entries if e[2])
        line = f"{status}  criterion {number}: {entries[0][1]}"
        terminalreporter.write_line(line + (f"  [{details}]" if details else ""))
