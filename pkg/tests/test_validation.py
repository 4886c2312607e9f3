import math

import pytest

from ballfield import validation


def test_check_turns_exceptions_into_failures():
    def boom():
        raise RuntimeError("bad")

    res = validation._check("x.boom", 1.0, boom)
    assert res.status == "fail" and math.isinf(res.worst_error) and "RuntimeError" in res.detail
    ok = validation._check("x.ok", 1e-3, lambda: (1e-4, "fine"))
    assert ok.passed and ok.detail == "fine" and ok.as_dict()["tolerance"] == 1e-3


def test_suite_registry():
    names = [c for checks in validation.SUITES.values() for c, _, _ in checks]
    assert len(names) == len(set(names))
    with pytest.raises(KeyError):
        validation.run_suite("nope")


def test_z_floor_handles_zero_standard_error():
    assert validation._z_max(0.0, 0.0, 0.0) == 0.0
    assert validation._z_max(1e-13, 0.0, 0.0) == pytest.approx(0.1)


def test_rho_suite_passes_with_progress():
    seen = []
    results = validation.run_suite("rho", seen.append)
    assert [r.check for r in seen] == [r.check for r in results]
    failed = [(r.check, r.worst_error, r.detail) for r in results if not r.passed]
    assert not failed
