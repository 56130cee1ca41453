"""Evaluation harness: bias/imprecision formulas and campaign scoring."""

import math
import random

import pytest

from fuzzcast import (
    InsufficientReplicationError,
    bias_imprecision,
    chao1,
    evaluate_estimator,
    evaluate_extrapolator,
    extrapolate_richness,
    geometric_checkpoints,
    run_campaign_set,
    scaled_bias_imprecision,
    uniform_assemblage,
    zipf_assemblage,
)


# -- the two formula pairs ------------------------------------------------


def test_perfect_estimates_have_zero_bias_and_imprecision():
    bias, imprecision = bias_imprecision([50.0, 50.0, 50.0], [50.0, 50.0, 50.0])
    assert bias == 0.0
    assert imprecision == 0.0
    bias, imprecision = scaled_bias_imprecision([7.0, 7.0], [7.0, 7.0])
    assert (bias, imprecision) == (0.0, 0.0)


def test_two_run_hand_case():
    s = 123.0
    bias, imprecision = bias_imprecision([2 * s, 0.0], [s, s], scale=s)
    assert bias == 0.0
    assert imprecision == math.sqrt(2.0)


def test_bias_sign_convention():
    # an estimator pinned at zero has scaled bias exactly -1
    bias, _ = bias_imprecision([0.0, 0.0], [40.0, 40.0], scale=40.0)
    assert bias == -1.0


def test_insufficient_replication():
    with pytest.raises(InsufficientReplicationError):
        bias_imprecision([1.0], [1.0])
    with pytest.raises(InsufficientReplicationError):
        scaled_bias_imprecision([1.0], [1.0])


def test_mismatched_lengths_rejected():
    with pytest.raises(ValueError):
        bias_imprecision([1.0, 2.0], [1.0])


# -- checkpoints ----------------------------------------------------------


def test_geometric_checkpoints():
    grid = geometric_checkpoints(100_000, points=8)
    assert grid == sorted(set(grid))
    assert grid[0] >= 1
    assert grid[-1] == 100_000
    assert len(grid) >= 5
    with pytest.raises(ValueError):
        geometric_checkpoints(0)


# -- estimator evaluation -------------------------------------------------


def _small_campaign_set(runs=4, n=4_000, s=100):
    return run_campaign_set(
        uniform_assemblage(s), n=n, seeds=range(runs), points=5
    )


def test_evaluate_estimator_report_shape():
    campaigns = _small_campaign_set()
    report = evaluate_estimator(campaigns, "chao1", reference="simulator-truth")
    assert report.kind == "estimator"
    assert all(row.runs == 4 for row in report.rows)
    assert all(row.imprecision >= 0.0 for row in report.rows)
    checkpoints = [row.checkpoint for row in report.rows]
    assert checkpoints == sorted(checkpoints)
    assert checkpoints[-1] == 4_000
    dicts = report.as_dicts()
    assert dicts[0].keys() == {"checkpoint", "estimator", "mean_bias", "imprecision", "runs"}


def test_evaluate_estimator_needs_replication():
    campaigns = _small_campaign_set(runs=1)
    with pytest.raises(InsufficientReplicationError):
        evaluate_estimator(campaigns, "chao1", reference="simulator-truth")


def test_unknown_reference_rejected():
    campaigns = _small_campaign_set(runs=2)
    with pytest.raises(ValueError):
        evaluate_estimator(campaigns, "chao1", reference="oracle")


def test_campaign_order_does_not_matter():
    campaigns = _small_campaign_set(runs=5)
    shuffled = list(campaigns)
    random.Random(1).shuffle(shuffled)
    a = evaluate_estimator(campaigns, "chao1", reference="simulator-truth")
    b = evaluate_estimator(shuffled, "chao1", reference="simulator-truth")
    assert a == b


def test_references_coincide_when_assemblage_is_exhausted():
    # uniform S=50 at n=20000 discovers everything, so the final empirical
    # count equals the true richness and the two references agree
    campaigns = run_campaign_set(
        uniform_assemblage(50), n=20_000, seeds=range(3), points=4
    )
    truth = evaluate_estimator(campaigns, "chao1", reference="simulator-truth")
    final = evaluate_estimator(campaigns, "chao1", reference="final-empirical")
    for row_t, row_f in zip(truth.rows, final.rows):
        assert row_t.mean_bias == pytest.approx(row_f.mean_bias, abs=1e-12)
        assert row_t.imprecision == pytest.approx(row_f.imprecision, abs=1e-12)


def test_uniform_chao1_is_nearly_unbiased():
    campaigns = run_campaign_set(
        uniform_assemblage(100), n=10_000, seeds=range(5), points=3
    )
    report = evaluate_estimator(campaigns, "chao1", reference="simulator-truth")
    last = report.rows[-1]
    assert abs(last.mean_bias) < 0.1
    assert last.imprecision < 0.1


# -- extrapolator evaluation ----------------------------------------------


def _chao1_extrapolator(freq, m):
    return extrapolate_richness(freq, chao1(freq), m).s_pred


def test_zero_horizon_extrapolation_is_exact():
    campaigns = run_campaign_set(uniform_assemblage(60), n=2_000, seeds=range(3))
    report = evaluate_extrapolator(campaigns, [0], _chao1_extrapolator)
    assert report.kind == "extrapolator"
    row = report.rows[0]
    assert row.checkpoint == 0
    assert row.mean_bias == 0.0
    assert row.imprecision == 0.0


def test_extrapolator_accuracy_within_n():
    campaigns = run_campaign_set(uniform_assemblage(200), n=4_000, seeds=range(10))
    report = evaluate_extrapolator(campaigns, [4_000], _chao1_extrapolator)
    assert abs(report.rows[0].mean_bias) < 0.05


def test_extrapolator_degradation_is_reported_not_asserted():
    # far beyond the data (m* = 5n) the extrapolator may drift; the report
    # must still be well-formed, no accuracy is claimed out there
    campaigns = run_campaign_set(zipf_assemblage(300, 1.2), n=2_000, seeds=range(4))
    report = evaluate_extrapolator(
        campaigns, [2_000, 10_000], _chao1_extrapolator
    )
    assert [row.checkpoint for row in report.rows] == [2_000, 10_000]
    for row in report.rows:
        assert math.isfinite(row.mean_bias)
        assert math.isfinite(row.imprecision)


def test_extrapolator_needs_replication_and_alignment():
    campaigns = run_campaign_set(uniform_assemblage(60), n=2_000, seeds=range(2))
    with pytest.raises(InsufficientReplicationError):
        evaluate_extrapolator(campaigns[:1], [100], _chao1_extrapolator)
    mixed = list(
        run_campaign_set(uniform_assemblage(60), n=2_000, seeds=[0])
    ) + list(run_campaign_set(uniform_assemblage(60), n=3_000, seeds=[1]))
    with pytest.raises(ValueError):
        evaluate_extrapolator(mixed, [100], _chao1_extrapolator)
