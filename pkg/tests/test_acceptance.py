"""Acceptance gate: each numbered criterion must hold at its stated
tolerance.  One pass/fail line is printed per criterion."""

import pytest

from cvdec.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    name, _ = CRITERIA[number]
    passed, detail = run_criterion(number)
    status = "PASS" if passed else "FAIL"
    with capsys.disabled():
        print(f"\n{status} criterion {number} ({name}): {detail}")
    assert passed, f"criterion {number} ({name}): {detail}"
