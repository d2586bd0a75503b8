import os

import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_configure(config):
    config.acceptance_lines = ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def full_grid() -> bool:
    """Set HBVM_FULL=1 to run the acceptance tables on every step count."""
    return os.environ.get("HBVM_FULL", "") not in ("", "0")
