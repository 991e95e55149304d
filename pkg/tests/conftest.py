from pathlib import Path

import pytest

from rqp.acceptance import TREE_CH, TREE_CT

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def tree_ch():
    return TREE_CH


@pytest.fixture
def tree_ct():
    return TREE_CT


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
