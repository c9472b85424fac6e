"""Acceptance suite: one test and one printed PASS/FAIL line per criterion."""

import pytest

from orrforge.reproduce import CRITERIA, run_suite

# stated time limits in seconds; per-group limits are enforced inside the criteria
BUDGETS = {
    "exceptions": 11 * 60.0,
    "c4xc2^4": 1800.0,
    "imrich": 11.0,
    "abelian-2-groups": 120.0,
    "bi-2-4": 300.0,
    "bii": 120.0,
    "c-k6": 1800.0,
    "iii-2^11": 600.0,
    "catalog-42": 300.0,
    "nowitz-watkins": 120.0,
    "beautiful-tuples": 300.0,
}


@pytest.fixture(scope="module")
def rows():
    # tier 3 runs everything, including the full stabiliser check on the order-2^11 witness
    return {r.key: r for r in run_suite(3)}


def test_every_criterion_is_listed():
    assert [c.key for c in CRITERIA] == list(BUDGETS)


@pytest.mark.parametrize("key", list(BUDGETS))
def test_criterion(rows, key, capsys):
    r = rows[key]
    ok = r.status == "PASS" and r.elapsed <= BUDGETS[key]
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'}  {key:<18} tier {r.tier}  {r.elapsed:8.2f}s  {r.detail}")
    assert ok, r.detail
