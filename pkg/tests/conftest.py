"""Shared fixtures and the acceptance-line reporter.

test_acceptance records one PASS/FAIL line per criterion; printing them
from a terminal-summary hook keeps them visible regardless of pytest's
output capturing.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
