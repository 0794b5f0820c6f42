import time

import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion: call with (number, ok, detail) once the checks have run."""
    t0 = time.perf_counter()

    def record(number, ok, detail=""):
        ACCEPTANCE[number] = (bool(ok), time.perf_counter() - t0, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, seconds, detail = ACCEPTANCE[number]
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  ({seconds:.1f} s)"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
