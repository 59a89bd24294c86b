"""Acceptance gate: the nine headline checks, one test each.

Every test prints the one-line verdict from the shared verification run so
`pytest -v -s tests/test_acceptance.py` reads as a scorecard.  The heavy
time-domain runs execute once per session via the module fixture.
"""

import pytest

from synthrot.verify import run_all


@pytest.fixture(scope="module")
def results():
    out = {r.index: r for r in run_all()}
    assert sorted(out) == list(range(1, 10))
    return out


def _check(results, index):
    res = results[index]
    print(res.line())
    assert res.passed, res.line()


def test_criterion_1_matched_circulation(results):
    _check(results, 1)


def test_criterion_2_reduced_depth_peak(results):
    _check(results, 2)


def test_criterion_3_full_bandwidth(results):
    _check(results, 3)


def test_criterion_4_io_vs_exact_on_resonance(results):
    _check(results, 4)


def test_criterion_5_kerr_and_saturation(results):
    _check(results, 5)


def test_criterion_6_time_domain_carriers_and_spurs(results):
    _check(results, 6)


def test_criterion_7_squid_schedule_sidebands(results):
    _check(results, 7)


def test_criterion_8_time_vs_frequency_cross_check(results):
    _check(results, 8)


def test_criterion_9_internal_consistency(results):
    _check(results, 9)


def test_negative_control_detuned_bandwidth_fails():
    # widening kappa by 10% must break the bandwidth check, proving the
    # gate actually measures the model
    res = run_all(kappa_scale=1.1, only=[3])[0]
    assert res.passed is False
