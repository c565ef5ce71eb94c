"""Collects the acceptance verdicts and prints them after the test run."""

import pytest

_VERDICTS: dict[int, tuple[bool, str]] = {}


def format_verdict(n: int, ok: bool, detail: str) -> str:
    return f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture
def report():
    def record(n: int, ok: bool, detail: str) -> bool:
        _VERDICTS[n] = (ok, detail)
        print(format_verdict(n, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        terminalreporter.write_line(format_verdict(n, *_VERDICTS[n]))
