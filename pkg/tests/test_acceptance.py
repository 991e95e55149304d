"""Every acceptance criterion at its stated tolerance, one PASS/FAIL line each."""

import pytest

from rqp.acceptance import CRITERIA

LINES: dict[int, str] = {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = CRITERIA[number]()
    LINES[number] = result.line()
    print(result.line())
    assert result.passed, result.line()
