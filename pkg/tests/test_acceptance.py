"""The ten acceptance criteria at their stated tolerances.

Each test records a one-line verdict; conftest prints all of them in the
terminal summary so the pass/fail state of every criterion is visible in a
plain `pytest` run.
"""
import math

import pytest

from nullcurves.verify import CHECKS


def _line(rec):
    value = "n/a" if rec["value"] is None else f"{rec['value']:.3g}"
    verdict = "PASS" if rec["passed"] else "FAIL"
    extra = ""
    if "error" in rec["detail"]:
        extra = f" ({rec['detail']['error']})"
    return f"criterion {rec['id']:>2}: {verdict}  {rec['name']}  value={value} threshold={rec['threshold']:g}{extra}"


@pytest.mark.parametrize("idx", sorted(CHECKS))
def test_criterion(idx, record_property):
    rec = CHECKS[idx]()
    line = _line(rec)
    record_property("acceptance", line)
    print(line)
    assert rec["passed"], line
    if rec["value"] is not None:
        assert math.isfinite(rec["value"])
