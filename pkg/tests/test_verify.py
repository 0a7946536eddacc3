import json

import pytest

from frspace.verify import CHECKS, SUITES, all_checks, run_verification, tolerance


def test_tolerance_profiles():
    assert tolerance(10) == 1e-10
    assert tolerance(10, "strict") == pytest.approx(1e-13)
    assert tolerance(None) == 0.0
    with pytest.raises(ValueError):
        tolerance(10, "lenient")


def test_check_ids_are_unique_and_namespaced():
    ids = [c.check_id for c in all_checks("all")]
    assert len(ids) == len(set(ids))
    for suite in SUITES:
        assert all(c.check_id.startswith(suite + ".") for c in CHECKS[suite])
    with pytest.raises(ValueError):
        all_checks("nope")


@pytest.mark.parametrize("suite", SUITES)
@pytest.mark.parametrize("dim", [2, 4])
def test_suites_pass(suite, dim):
    rep = run_verification(suite, dim=dim, samples=12, seed=3, jobs=1)
    assert rep.passed, rep.failures()
    for cell in rep.cells:
        assert cell["pass"] == (cell["max_residual"] <= cell["tolerance"])
        assert cell["paper_ref"]


def test_report_is_deterministic_and_versioned():
    r1 = run_verification("spray", dim=3, samples=6, seed=11, jobs=1).to_dict()
    r2 = run_verification("spray", dim=3, samples=6, seed=11, jobs=1).to_dict()
    r1.pop("timestamp"), r2.pop("timestamp")
    assert r1 == r2
    assert r1["schema_version"] == 1
    json.dumps(r1)


def test_checks_are_independent_of_selection():
    one = run_verification("metric", dim=3, samples=5, seed=2, jobs=1).cells
    full = [c for c in run_verification("all", dim=3, samples=5, seed=2, jobs=1).cells if c["check_id"].startswith("metric.")]
    assert one == full


def test_argument_validation():
    with pytest.raises(ValueError):
        run_verification("metric", dim=1)
    with pytest.raises(ValueError):
        run_verification("metric", samples=0)
