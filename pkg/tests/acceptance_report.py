"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

LINES = {}


def record(criterion: int, passed: bool, detail: str):
    LINES[criterion] = (bool(passed), detail)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
