import os

import pytest
from hypothesis import settings

# derandomized by default so the suite is reproducible; HYPOTHESIS_PROFILE=explore for fresh draws
settings.register_profile("default", derandomize=True, deadline=None)
settings.register_profile("explore", deadline=None, max_examples=2000)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_acceptance_rows = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_acceptance_rows] = []


@pytest.fixture
def report_criterion(request):
    """Record one acceptance line; printed in the terminal summary."""

    def record(number: int, name: str, passed: bool, detail: str) -> None:
        config = request.config
        config.stash[_acceptance_rows].append((number, name, passed, detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(_acceptance_rows, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(rows):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {name}: {detail}")
