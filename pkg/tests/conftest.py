import numpy as np
import pytest

_LINES = {}


def record(criterion, ok, detail=""):
    """Remember one acceptance outcome; merged per criterion at the end."""
    prev = _LINES.get(criterion)
    if prev is not None:
        ok = ok and prev[0]
        detail = prev[1] + "; " + detail
    _LINES[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_LINES, key=int):
        ok, detail = _LINES[c]
        terminalreporter.write_line(f"criterion {c:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
