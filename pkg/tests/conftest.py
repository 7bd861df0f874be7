import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Record one acceptance line: record(id, passed, detail)."""
    def _record(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        print(f"ACCEPTANCE {name}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
