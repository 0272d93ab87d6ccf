import functools

import pytest

from equiloc import scenarios

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def cached_scenario(name, **params):
    return scenarios.builtin(name, **params)


@pytest.fixture
def scenario():
    return cached_scenario


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
