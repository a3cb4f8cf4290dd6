"""One test per acceptance criterion; each prints a PASS/FAIL line at its stated tolerance."""

import json

import pytest

from nsesym.checks import ACCEPTANCE

SEED = 0


@pytest.mark.parametrize("criterion", range(1, len(ACCEPTANCE) + 1))
def test_criterion(criterion, acceptance_log):
    r = ACCEPTANCE[criterion - 1](SEED)
    line = r.line()
    print(line)
    acceptance_log.append(line)
    assert r.passed, json.dumps(r.to_json()["detail"], indent=1, default=str)[:4000]
    assert r.within_budget, f"{r.seconds:.1f}s exceeds the {r.budget}s budget"
