"""Pytest wiring: make the shared helper module importable from any test
and echo the acceptance-criteria results in the terminal summary so every
run ends with one visible line per criterion."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# (criterion name, passed) pairs appended by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"ACCEPTANCE[{name}]: {'PASS' if ok else 'FAIL'}")
