from functools import lru_cache

import pytest

from heomgp.integrate import evolve
from heomgp.model import ModelParams

# one line per acceptance criterion, echoed at the end of the session
VERDICTS: list[str] = []


@lru_cache(maxsize=None)
def cached_evolve(p: ModelParams):
    return evolve(p)


@pytest.fixture(scope="session")
def run():
    return cached_evolve


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
