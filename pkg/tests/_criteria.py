"""Pass/fail registry for the acceptance criteria, reported at session end."""

import time
from contextlib import contextmanager

RESULTS = {}


@contextmanager
def criterion(number, title):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        detail = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        RESULTS[number] = ("FAIL", title, time.perf_counter() - start, detail)
        raise
    RESULTS[number] = ("PASS", title, time.perf_counter() - start, "")


def report_lines():
    lines = []
    for number in sorted(RESULTS):
        status, title, elapsed, detail = RESULTS[number]
        line = f"criterion {number}: {status}  {title} ({elapsed:.1f} s)"
        if detail:
            line += f"  [{detail}]"
        lines.append(line)
    return lines
