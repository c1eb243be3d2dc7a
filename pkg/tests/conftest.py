import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion (merged across parts)."""
    def record(number: int, name: str, passed: bool, detail: str = ""):
        prev = _CRITERIA.get(number)
        if prev is not None:
            passed = passed and prev[1]
            detail = f"{prev[2]}; {detail}" if detail else prev[2]
        _CRITERIA[number] = (name, bool(passed), detail)
        print(f"{'PASS' if passed else 'FAIL'} criterion {number:2d} ({name}): {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        name, ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {n:2d}  {name}: {detail}")
