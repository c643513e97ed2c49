import pytest

from ionjump import load_database

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def db():
    return load_database()


def record_acceptance(criterion: str, passed: bool, detail: str) -> None:
    """Collect one pass/fail line per acceptance criterion for the
    end-of-run summary."""
    status = "PASS" if passed else "FAIL"
    _ACCEPTANCE_LINES.append(f"ACCEPTANCE {criterion}: {status} — {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
