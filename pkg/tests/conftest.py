from __future__ import annotations

import pytest
from hypothesis import settings

from iscr.scenario import load_scenario

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def baseline():
    return load_scenario()


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record and print the verdict line for one acceptance criterion."""
    def report(number: int, description: str, checks: list[tuple[str, bool]]):
        failed = [name for name, ok in checks if not ok]
        status = "FAIL" if failed else "PASS"
        detail = f" [failed: {'; '.join(failed)}]" if failed else ""
        line = f"{status} criterion {number}: {description}{detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        assert not failed, line
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
