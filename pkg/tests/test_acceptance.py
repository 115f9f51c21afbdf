"""Runs every acceptance criterion once and prints one pass/fail line per criterion."""
import time

import pytest

from l2vhs.acceptance import CRITERIA, run_criterion

BUDGET_SECONDS = 60.0


@pytest.fixture(scope="module")
def verdicts(pytestconfig):
    capture = pytestconfig.pluginmanager.getplugin("capturemanager")
    start = time.perf_counter()
    out = {}
    for number, _, _ in CRITERIA:
        out[number] = run_criterion(number)
        with capture.global_and_fixture_disabled():
            print("\n" + out[number].line(), end="", flush=True)
    out["total"] = time.perf_counter() - start
    with capture.global_and_fixture_disabled():
        passed = sum(v.passed for k, v in out.items() if k != "total")
        print(f"\nacceptance: {passed}/{len(CRITERIA)} passed in {out['total']:.1f}s")
    return out


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA])
def test_criterion(verdicts, number):
    v = verdicts[number]
    assert v.passed, v.line()


def test_suite_within_budget(verdicts):
    assert verdicts["total"] < BUDGET_SECONDS
