import pytest

_ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one acceptance line; the terminal summary prints them in order."""
    def _record(key, ok, detail):
        _ACCEPTANCE[str(key)] = (bool(ok), detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
