import pytest

from scissors.acceptance import CHECKS


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__ for c in CHECKS])
def test_criterion(check, record_property):
    result = check()
    record_property("criterion", result.line())
    print(result.line())
    assert result.ok, result.failures[:5]
