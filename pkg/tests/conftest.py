import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gl2kloosterman.field import make_field  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def f4():
    return make_field(2)


@pytest.fixture(scope="session")
def f8():
    return make_field(3)


@pytest.fixture(scope="session")
def f16():
    return make_field(4)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
