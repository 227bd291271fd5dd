"""Full-scale acceptance gate: one test per shipped criterion.

The suite instance is shared across the module so the expensive
simulation runs are done once.  Each test prints the criterion's
pass/fail line and fails with the measured details attached.
"""

import json

import pytest

from gg1lab.acceptance import AcceptanceSuite, write_report_files


@pytest.fixture(scope="module")
def suite():
    return AcceptanceSuite(scale=1.0, master_seed=2026)


def check(suite, number):
    result = suite.criterion(number)
    print(result.line())
    assert result.passed, json.dumps(result.details, indent=2, default=str)
    return result


def test_criterion_01_holding_equals_observed_response(suite):
    check(suite, 1)


def test_criterion_02_exact_response_decomposition(suite):
    check(suite, 2)


def test_criterion_03_time_average_matches_rate_times_response(suite):
    check(suite, 3)


def test_criterion_04_queue_length_estimates_agree(suite):
    check(suite, 4)


def test_criterion_05_engine_matches_recursion_bitwise(suite):
    check(suite, 5)


def test_criterion_06_inspection_moments(suite):
    check(suite, 6)


def test_criterion_07_inspection_densities(suite):
    check(suite, 7)


def test_criterion_08_renewal_reward_estimators(suite):
    check(suite, 8)


def test_criterion_09_control_model_evaluation(suite):
    check(suite, 9)


def test_criterion_10_sweep_minimiser_agreement(suite):
    check(suite, 10)


def test_criterion_11_response_gap_horizon_free(suite):
    check(suite, 11)


def test_criterion_12_pipeline_byte_deterministic(suite):
    check(suite, 12)


def test_report_files_round_trip(tmp_path, suite):
    """The emitted report files reflect the same results the tests saw."""
    results = [suite.criterion(k) for k in (1, 2)]
    paths = write_report_files(results, tmp_path, suite.master_seed, suite.scale)
    text = (tmp_path / "acceptance.txt").read_text()
    assert "criterion 01 PASS" in text
    assert text.rstrip().endswith("2/2 criteria passed")
    payload = json.loads((tmp_path / "acceptance_report.json").read_text())
    assert payload["all_passed"] is True
    assert [r["number"] for r in payload["results"]] == [1, 2]
    assert len(paths) == 2
