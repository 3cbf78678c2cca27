import pytest

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def record():
    """Record one acceptance line; the summary hook prints them in order."""

    def _record(key: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE[key] = f"{key}: {'PASS' if passed else 'FAIL'} ({detail})"
        print(_ACCEPTANCE[key])

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[-1])):
        terminalreporter.write_line(_ACCEPTANCE[key])
