import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    entry = {"name": request.node.name, "detail": ""}
    ACCEPTANCE_LINES.append(entry)

    def note(detail):
        entry["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    if rep is None:
        entry["status"] = "ERROR"
    elif rep.skipped:
        entry["status"] = "SKIP"
    else:
        entry["status"] = "PASS" if rep.passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for entry in ACCEPTANCE_LINES:
        status = entry.get("status", "SKIP")
        terminalreporter.write_line(f"[{status:5s}] {entry['name']}  {entry['detail']}")
