import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(k, ok, detail, seconds)."""
    def record(k, ok, detail, seconds):
        line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} ({seconds:.1f} s) {detail}"
        _CRITERIA[k] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[k])
