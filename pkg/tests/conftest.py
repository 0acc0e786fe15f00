"""Make sibling helper modules (oracles) importable from every test file,
and echo the acceptance verdict lines in the terminal summary so they are
visible whether or not the individual tests passed."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICT_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
