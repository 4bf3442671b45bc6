from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mubsig.bases import BasisId, Family, pair_outcome_labels
from mubsig.harness import (
    AnalyticDistribution,
    EveMode,
    HarnessConfig,
    Protocol,
    analytic_outcome_distribution,
    calibrate_tv_threshold,
    compare_distributions,
    derive_round_stream,
    dual_family_detection_probability,
    pretest_reference_distribution,
    run_trials,
)
from mubsig.protocol import pair_outcome_probs, run_original_session


def original(rounds=100, **kw):
    return HarnessConfig(d=2, protocol=Protocol.ORIGINAL, rounds=rounds, **kw)


# ---------------------------------------------------------------------------
# Configuration validation
# ---------------------------------------------------------------------------

def test_config_accepts_the_three_protocols():
    original()
    HarnessConfig(d=3, protocol=Protocol.TOMOGRAPHIC, rounds=100,
                  pretest_fraction=0.2, posttest_fraction=0.5)
    HarnessConfig(d=3, protocol=Protocol.DUAL_FAMILY, rounds=100,
                  posttest_fraction=0.5, eve=EveMode.DUAL_FAMILY)


def test_config_rejects_bad_dimension_rounds_seed():
    with pytest.raises(ValueError):
        HarnessConfig(d=4, protocol=Protocol.ORIGINAL, rounds=10)
    with pytest.raises(ValueError):
        original(rounds=0)
    with pytest.raises(ValueError):
        original(seed=-1)
    with pytest.raises(ValueError):
        original(seed=2 ** 64)


def test_config_rejects_mismatched_attacks():
    with pytest.raises(ValueError):
        HarnessConfig(d=2, protocol=Protocol.DUAL_FAMILY, rounds=10,
                      posttest_fraction=0.5, eve=EveMode.INTERCEPT)
    with pytest.raises(ValueError):
        original(eve=EveMode.DUAL_FAMILY)
    with pytest.raises(ValueError):
        HarnessConfig(d=2, protocol=Protocol.TOMOGRAPHIC, rounds=10,
                      pretest_fraction=0.2, posttest_fraction=0.5,
                      eve=EveMode.DUAL_FAMILY)


def test_config_fraction_requirements():
    with pytest.raises(ValueError):
        HarnessConfig(d=2, protocol=Protocol.TOMOGRAPHIC, rounds=10,
                      posttest_fraction=0.5)
    with pytest.raises(ValueError):
        HarnessConfig(d=2, protocol=Protocol.TOMOGRAPHIC, rounds=10,
                      pretest_fraction=0.2)
    with pytest.raises(ValueError):
        HarnessConfig(d=2, protocol=Protocol.DUAL_FAMILY, rounds=10)
    with pytest.raises(ValueError):
        original(posttest_fraction=0.5)   # no verification step to tune
    with pytest.raises(ValueError):
        original(pretest_fraction=0.2)
    with pytest.raises(ValueError):
        HarnessConfig(d=2, protocol=Protocol.DUAL_FAMILY, rounds=10,
                      posttest_fraction=1.0)


def test_config_alphabet_tracks_protocol():
    assert len(original().alphabet()) == 3
    dual = HarnessConfig(d=2, protocol=Protocol.DUAL_FAMILY, rounds=10,
                         posttest_fraction=0.5)
    assert len(dual.alphabet()) == 6
    assert {b.family for b in dual.alphabet()} == {Family.PLAIN, Family.HAT}


def test_config_message_weights():
    assert original().message_weights() is None
    cfg = original(message_distribution={"comp": 1.0, "q1": 3.0})
    assert_allclose(cfg.message_weights(), [1.0, 0.0, 3.0])
    with pytest.raises(ValueError):
        original(message_distribution="lumpy")
    with pytest.raises(ValueError):
        original(message_distribution={"q7": 1.0})
    with pytest.raises(ValueError):
        original(message_distribution={"hat-q0": 1.0})  # wrong family
    with pytest.raises(ValueError):
        original(message_distribution={"q0": -1.0})
    with pytest.raises(ValueError):
        original(message_distribution={"q0": 0.0})


# ---------------------------------------------------------------------------
# Reference distributions and the comparison statistic
# ---------------------------------------------------------------------------

def test_analytic_distribution_validation():
    with pytest.raises(ValueError):
        AnalyticDistribution(("a", "b"), np.array([1.0]))
    with pytest.raises(ValueError):
        AnalyticDistribution(("a", "b"), np.array([1.2, -0.2]))
    with pytest.raises(ValueError):
        AnalyticDistribution(("a", "b"), np.array([0.6, 0.6]))
    dist = AnalyticDistribution(("a", "b"), np.array([0.25, 0.75]))
    assert dist.as_mapping() == {"a": 0.25, "b": 0.75}


def test_analytic_outcome_distribution_wraps_exact_table():
    for d in (2, 3):
        for basis in (BasisId(Family.PLAIN, 0), BasisId(Family.HAT, None)):
            dist = analytic_outcome_distribution(d, basis)
            assert dist.labels == pair_outcome_labels(d)
            assert_allclose(dist.probabilities,
                            pair_outcome_probs(d, basis.family, basis))
            assert abs(dist.as_mapping()[(0, 0)] - 1.0 / d) < 1e-12


def test_pretest_reference_distribution_shape():
    dist = pretest_reference_distribution(2)
    assert dist.probabilities.size == 36
    assert abs(dist.probabilities.sum() - 1.0) < 1e-12


def test_compare_distributions_array_and_mapping():
    ref = AnalyticDistribution(("x", "y"), np.array([0.5, 0.5]))
    exact = compare_distributions(np.array([50, 50]), ref, threshold=0.01)
    assert exact.tv_distance == 0.0 and exact.passed
    skewed = compare_distributions({"x": 75, "y": 25}, ref, threshold=0.1)
    assert_allclose(skewed.tv_distance, 0.25)
    assert not skewed.passed
    partial = compare_distributions({"x": 10}, ref, threshold=0.6)
    assert_allclose(partial.tv_distance, 0.5)   # missing labels count as zero


def test_compare_distributions_rejects_bad_counts():
    ref = AnalyticDistribution(("x", "y"), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        compare_distributions({"z": 3}, ref, threshold=0.1)
    with pytest.raises(ValueError):
        compare_distributions(np.array([1, 2, 3]), ref, threshold=0.1)
    with pytest.raises(ValueError):
        compare_distributions(np.array([-1, 2]), ref, threshold=0.1)
    with pytest.raises(ValueError):
        compare_distributions(np.array([0, 0]), ref, threshold=0.1)


def test_calibrate_tv_threshold_behavior():
    ref = pretest_reference_distribution(2)
    t1 = calibrate_tv_threshold(ref, 2000, seed=5)
    t2 = calibrate_tv_threshold(ref, 2000, seed=5)
    t3 = calibrate_tv_threshold(ref, 2000, seed=6)
    assert t1 == t2
    assert t1 != t3
    assert 0.0 < t1 < 0.5
    # the statistic shrinks roughly as 1/sqrt(n)
    assert calibrate_tv_threshold(ref, 20000, seed=5) < t1
    with pytest.raises(ValueError):
        calibrate_tv_threshold(ref, 0, seed=5)


def test_stream_derivation_pure_and_decoupled():
    a = derive_round_stream(42, 7).random(5)
    b = derive_round_stream(42, 7).random(5)
    c = derive_round_stream(42, 8).random(5)
    d = derive_round_stream(43, 7).random(5)
    assert_allclose(a, b)
    assert not np.allclose(a, c)
    assert not np.allclose(a, d)
    with pytest.raises(ValueError):
        derive_round_stream(42, -1)


# ---------------------------------------------------------------------------
# Closed-form detection probability for the dual-family attack
# ---------------------------------------------------------------------------

def test_dual_detection_probability_frozen_values():
    assert_allclose(dual_family_detection_probability(2), float(Fraction(7, 24)), atol=1e-12)
    assert_allclose(dual_family_detection_probability(3), float(Fraction(11, 32)), atol=1e-12)
    assert_allclose(dual_family_detection_probability(5), float(Fraction(469, 1200)), atol=1e-12)


def test_dual_detection_probability_family_symmetric():
    for d in (2, 3):
        plain = dual_family_detection_probability(d, Family.PLAIN)
        hat = dual_family_detection_probability(d, Family.HAT)
        assert_allclose(plain, hat, atol=1e-12)


def test_dual_detection_probability_matches_simulation():
    p = dual_family_detection_probability(2)
    cfg = HarnessConfig(d=2, protocol=Protocol.DUAL_FAMILY, rounds=30000,
                        posttest_fraction=0.5, seed=9, eve=EveMode.DUAL_FAMILY)
    report = run_trials(cfg)
    sigma = np.sqrt(p * (1 - p) / (report.sifted * 0.4))  # checked ~ half of sifted
    assert abs(report.detection_rate - p) < 5 * sigma


def test_dual_detection_probability_with_weights():
    """Loading all weight on one family cannot hide the attack either."""
    weights = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    p = dual_family_detection_probability(2, Family.PLAIN, weights)
    q = dual_family_detection_probability(2, Family.HAT, weights)
    assert p == 0.0          # matching family: attack invisible in plain traffic
    assert q > 0.25          # mismatched family: strongly visible


# ---------------------------------------------------------------------------
# run_trials dispatch
# ---------------------------------------------------------------------------

def test_run_trials_matches_direct_session_call():
    cfg = original(rounds=2000, seed=3, eve=EveMode.INTERCEPT)
    direct, _ = run_original_session(2, 2000, seed=3, eve=True)
    assert run_trials(cfg) == direct


def test_run_trials_worker_count_is_invisible():
    cfg = HarnessConfig(d=3, protocol=Protocol.TOMOGRAPHIC, rounds=4000,
                        pretest_fraction=0.25, posttest_fraction=0.5, seed=12)
    assert run_trials(cfg, workers=1) == run_trials(cfg, workers=4)
    with pytest.raises(ValueError):
        run_trials(cfg, workers=0)


def test_run_trials_return_rounds():
    cfg = original(rounds=250, seed=1)
    report, records = run_trials(cfg, return_rounds=True)
    assert len(records) == 250
    assert report.rounds == 250


def test_run_trials_message_distribution_steers_bob():
    cfg = original(rounds=300, seed=6,
                   message_distribution={"q0": 1.0})
    _, records = run_trials(cfg, return_rounds=True)
    assert all(r.bob_basis == BasisId(Family.PLAIN, 0) for r in records)
