"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict that the terminal summary
prints under "acceptance criteria".
"""
import pytest

from antiwick import acceptance
from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("fn", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(fn):
    res = fn()
    line = res.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert res.passed, line
