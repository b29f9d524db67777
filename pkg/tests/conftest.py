import time
from contextlib import contextmanager

import pytest

# criterion number -> (passed, description, seconds, detail)
ACCEPTANCE: dict[int, tuple[bool, str, float, str]] = {}


@contextmanager
def _record(number: int, description: str, budget: float):
    t0 = time.perf_counter()
    detail = ""
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE[number] = (False, description, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}")
        raise
    dt = time.perf_counter() - t0
    ok = dt < budget
    if not ok:
        detail = f"runtime {dt:.1f} s over budget {budget:g} s"
    ACCEPTANCE[number] = (ok, description, dt, detail)
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} {description} ({dt:.2f} s)"
    print(line)
    assert ok, detail


@pytest.fixture
def criterion():
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, desc, dt, detail = ACCEPTANCE[n]
        extra = f" [{detail.splitlines()[0][:120]}]" if detail and not ok else ""
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} {desc} ({dt:.2f} s){extra}")
