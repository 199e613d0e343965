"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import pytest

from rotkepler.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [num for num, _, _ in CRITERIA], ids=[f"criterion-{num}" for num, _, _ in CRITERIA])
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print(f"\n[{'PASS' if result.passed else 'FAIL'}] {result.number:>2} {result.name}: "
              f"{result.detail} ({result.seconds:.2f}s)")
    assert result.passed, result.detail
