"""The thirteen acceptance criteria, one test each, seed 0.

Each test prints a PASS/FAIL line before asserting, and the lines are
repeated in the terminal summary; ``tightspan verify --suite all`` runs the same functions.
"""
import pytest

from conftest import ACCEPTANCE_LINES
from tightspan.acceptance import CRITERIA

SEED = 0


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion_{c.number:02d}")
def test_criterion(criterion):
    result = criterion(SEED)
    print(result.line())
    ACCEPTANCE_LINES.append(result.line())
    assert result.passed, result.details
