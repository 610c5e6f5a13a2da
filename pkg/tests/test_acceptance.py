"""The twelve acceptance criteria at their pass thresholds, one test each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS/FAIL lines.
"""

import pytest

from vortexwave.validation import CRITERIA, run_criteria


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in run_criteria()}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, results):
    r = results[number]
    status = "PASS" if r.passed else "FAIL"
    print(f"\ncriterion {r.number:2d} {r.name}: {status} worst={r.worst:.3e} threshold={r.threshold:.3e} {r.detail}")
    assert r.passed, f"{r.name}: worst {r.worst:.6g} exceeds {r.threshold:.6g} ({r.detail})"
