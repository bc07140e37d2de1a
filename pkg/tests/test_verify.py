import json

import pytest

from vortexsym import schemas, verify
from vortexsym.verify import Check, VerifyReport


def test_check_line_format():
    c = Check("identities", "group_sum[T]", True, 3.2e-16, 1e-12, "max |entry|")
    assert c.line() == "group_sum[T]: PASS (max |entry| 3.2e-16, limit 1e-12)"
    assert Check("x", "y", False, 2.0, 1.0, "err").line() == "y: FAIL (err 2.0e+00, limit 1e+00)"


def test_report_json_excludes_timings():
    report = VerifyReport([Check("a", "b", True, 0.0, 1.0, "m")], {"a": 1.23})
    doc = report.to_json()
    schemas.validate(doc, schemas.VERIFY)
    assert "1.23" not in json.dumps(doc)


def test_tables_section():
    report = verify.run(["tables"])
    names = [c.name for c in report.checks]
    # 16 (lambda, z) entries over four tables; the 2-gon anti-prism with poles is absent
    assert len(names) == 32
    assert sum(name.endswith("absent") for name in names) == 2
    assert report.passed, report.lines()


@pytest.mark.parametrize("section", ["tetrahedral", "identities", "momentum"])
def test_fast_sections_pass(section):
    report = verify.run([section])
    assert report.passed, [line for line in report.lines() if "FAIL" in line]


def test_unknown_section():
    with pytest.raises(KeyError):
        verify.run(["nope"])


def test_deterministic_for_seed():
    a = verify.run(["identities"], seed=3).to_json()
    b = verify.run(["identities"], seed=3).to_json()
    assert a == b
