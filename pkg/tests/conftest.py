from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path

import pytest

from insidernet.ingest import DateSequence, Side

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, tuple[str, str]] = {}


def day(n: int) -> date:
    """Calendar date ``n`` days after an arbitrary origin; d1 < d2 < ..."""
    return date(2014, 1, 1) + timedelta(days=n)


def seq(insider: str, days, company: str = "ACME", side: Side = Side.SALE) -> DateSequence:
    return DateSequence(insider, company, side, tuple(sorted({day(n) for n in days})))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        previous = _criteria.get(number)
        if previous is None or previous[0] == "PASS":
            _criteria[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"AC{number:02d} {status}  {title}")
