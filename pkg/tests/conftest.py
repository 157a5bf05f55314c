import pytest

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    entry = {}

    def record(number, title, detail=""):
        entry.update(number=number, title=title, detail=detail)

    yield record
    if entry:
        call = getattr(request.node, "rep_call", None)
        ok = call is not None and call.passed
        _ACCEPTANCE[entry["number"]] = ("PASS" if ok else "FAIL", entry["title"], entry["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.rep_call = report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[number]
        line = f"[{status}] criterion {number}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
