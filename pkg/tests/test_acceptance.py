"""The eleven acceptance checks, one test each.

Each test prints a single ``[PASS]``/``[FAIL]`` line; run with ``-s`` (or as
a script) to see them.  Tolerances and time limits live in
``cocyclelab.acceptance``.
"""
import sys

import pytest

from cocyclelab.acceptance import CRITERIA, run_criterion

NUMBERS = list(CRITERIA) + [11]


@pytest.mark.parametrize("number", NUMBERS, ids=[f"criterion_{n:02d}" for n in NUMBERS])
def test_criterion(number):
    res = run_criterion(number, seed=0)
    print(res.line())
    assert res.passed, res.line()
    assert res.seconds < res.limit


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("number", [n for n, (_, _, seeded) in CRITERIA.items() if seeded and n != 9])
def test_seeded_criteria_other_seeds(number, seed):
    res = run_criterion(number, seed=seed)
    print(res.line())
    assert res.passed, res.line()


if __name__ == "__main__":
    results = [run_criterion(n) for n in NUMBERS]
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
