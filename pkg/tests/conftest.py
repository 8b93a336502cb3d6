import os

import pytest

CRITERIA: dict[int, str] = {}


def record(number: int, passed: bool | None, detail: str) -> None:
    status = "EXCLUDED" if passed is None else ("PASS" if passed else "FAIL")
    CRITERIA[number] = f"criterion {number:2d} {status}: {detail}"


@pytest.fixture
def criterion():
    return record


def long_runs_enabled() -> bool:
    return os.environ.get("ARTIFACT_LONG", "") not in ("", "0")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])
