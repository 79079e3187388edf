"""Collects one summary line per acceptance criterion for the terminal report."""

import time
from contextlib import contextmanager

LINES: list[str] = []


@contextmanager
def criterion(number: int, name: str, budget: float):
    start = time.perf_counter()
    info: dict = {}
    try:
        yield info
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        line = f"criterion {number:2d} FAIL  {name} ({elapsed:.1f}s) {type(exc).__name__}: {str(exc)[:160]}"
        LINES.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    detail = "; ".join(f"{k}={v}" for k, v in info.items())
    status = "PASS" if elapsed < budget else "FAIL"
    line = f"criterion {number:2d} {status}  {name} ({elapsed:.1f}s, budget {budget:g}s) {detail}"
    LINES.append(line)
    print(line)
    assert elapsed < budget, f"runtime {elapsed:.1f}s exceeds {budget}s"
