"""Acceptance criteria. Run ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line each."""
import pytest

from clusterx.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[fn.__name__ for fn in CRITERIA])
def test_criterion(criterion):
    res = criterion()
    print(res.line())
    assert res.passed, res.line()
