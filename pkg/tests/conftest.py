import contextlib

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def record(number, title):
        details = []
        try:
            yield details
        except BaseException:
            ACCEPTANCE_LINES.append((number, "FAIL", title, "; ".join(details)))
            raise
        ACCEPTANCE_LINES.append((number, "PASS", title, "; ".join(details)))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, title, detail in sorted(ACCEPTANCE_LINES):
        line = f"AC{number} {status}: {title}"
        terminalreporter.write_line(f"{line} [{detail}]" if detail else line)
