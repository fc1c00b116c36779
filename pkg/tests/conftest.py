import pytest

_VERDICTS = {}


@pytest.fixture
def verdict():
    """Record ``(criterion, ok, detail)`` for the closing acceptance summary."""

    def record(criterion, ok, detail=""):
        _VERDICTS.setdefault(criterion, []).append((bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_VERDICTS):
        results = _VERDICTS[criterion]
        ok = all(r for r, _ in results)
        detail = "; ".join(d for _, d in results)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
