import time
from contextlib import contextmanager

import pytest

_RESULTS: list[tuple[str, bool, float, str]] = []


@pytest.fixture
def criterion():
    """Context manager that records one acceptance line: id, pass/fail, elapsed, note."""

    @contextmanager
    def run(cid: str, budget_s: float, note: str = ""):
        info = {"note": note}
        start = time.perf_counter()
        ok = False
        try:
            yield info
            elapsed = time.perf_counter() - start
            assert elapsed < budget_s, f"{cid} took {elapsed:.2f}s, budget {budget_s}s"
            ok = True
        finally:
            _RESULTS.append((cid, ok, time.perf_counter() - start, info["note"]))

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, elapsed, note in _RESULTS:
        line = f"{'PASS' if ok else 'FAIL'}  {cid}  ({elapsed:.3f}s)"
        if note:
            line += f"  {note}"
        terminalreporter.write_line(line)
