from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopsense.errors import ConfigError
from coopsense.sensing import (
    CorrelationSpec,
    DecisionVector,
    beta_parameters,
    DetectorProfile,
    Hypothesis,
    count_pmf,
    draw_decision_matrix,
    draw_local_decisions,
    estimate_pairwise_correlation,
    joint_pmf,
)

DET = DetectorProfile(0.9, 0.05)


def test_detector_validation():
    with pytest.raises(ConfigError):
        DetectorProfile(0.05, 0.9)
    with pytest.raises(ConfigError):
        DetectorProfile(1.0, 0.1)
    with pytest.raises(ConfigError):
        CorrelationSpec(-0.1, 0.5)


def test_decision_vector_counts():
    v = DecisionVector(np.array([1, 0, 1, 1, 0], dtype=np.uint8), 3)
    assert (v.n, v.ones, v.m) == (5, 3, 2)


@pytest.mark.parametrize(
    "n, ones, rho, p_d, expected",
    [
        (2, 2, 0.5, 0.9, 0.855),
        (2, 0, 0.5, 0.9, 0.055),
        (3, 2, 0.0, 0.9, 0.081),
    ],
)
def test_joint_pmf_examples(n, ones, rho, p_d, expected):
    det = DetectorProfile(p_d, 0.05)
    assert joint_pmf(n, ones, Hypothesis.H1, det, CorrelationSpec.uniform(rho)) == pytest.approx(expected)


def test_joint_pmf_perfect_correlation():
    corr = CorrelationSpec.uniform(1.0)
    assert joint_pmf(4, 4, Hypothesis.H1, DET, corr) == pytest.approx(0.9)
    assert joint_pmf(4, 0, Hypothesis.H1, DET, corr) == pytest.approx(0.1)
    assert joint_pmf(4, 2, Hypothesis.H1, DET, corr) == 0.0


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(1, 12),
    rho=st.floats(0.0, 1.0),
    p_d=st.floats(0.51, 0.99),
    p_fa=st.floats(0.01, 0.49),
    truth=st.sampled_from([Hypothesis.H0, Hypothesis.H1]),
)
def test_count_pmf_is_a_distribution_with_right_mean(n, rho, p_d, p_fa, truth):
    det = DetectorProfile(p_d, p_fa)
    pmf = count_pmf(n, truth, det, CorrelationSpec.uniform(rho))
    assert np.all(pmf >= 0)
    assert pmf.sum() == pytest.approx(1.0, abs=1e-9)
    assert (np.arange(n + 1) @ pmf) == pytest.approx(n * det.marginal(truth), rel=1e-9)


def test_beta_parameters_match_correlation():
    a, b = beta_parameters(0.9, 0.5)
    assert (a, b) == pytest.approx((0.9, 0.1))
    # correlation of a Beta-mixed Bernoulli pair is 1 / (a + b + 1)
    assert 1 / (a + b + 1) == pytest.approx(0.5)


@pytest.mark.parametrize("rho", [0.0, 0.3, 0.5, 1.0])
def test_marginal_and_correlation_calibration(rho):
    rng = np.random.default_rng(11)
    x = draw_decision_matrix(10, Hypothesis.H1, DET, CorrelationSpec.uniform(rho), rng, 1_000_000)
    assert x.mean() == pytest.approx(0.9, abs=0.005)
    if rho == 1.0:
        assert np.all(x.min(axis=1) == x.max(axis=1))
        assert x[:, 0].mean() == pytest.approx(0.9, abs=0.005)
    else:
        assert estimate_pairwise_correlation(x) == pytest.approx(rho, abs=0.01)


def test_pair_probability_two_sensors():
    rng = np.random.default_rng(12)
    x = draw_decision_matrix(2, Hypothesis.H1, DET, CorrelationSpec.uniform(0.5), rng, 1_000_000)
    assert np.mean(x.sum(axis=1) == 2) == pytest.approx(0.855, abs=0.003)


def test_pmf_two_zeros_by_monte_carlo():
    # 10^7 draws in chunks: P(u1 = u2 = 0 | H1) at rho = 0.5
    rng = np.random.default_rng(13)
    corr = CorrelationSpec.uniform(0.5)
    hits = 0
    for _ in range(10):
        hits += int(np.sum(draw_decision_matrix(2, 1, DET, corr, rng, 1_000_000).sum(axis=1) == 0))
    p = joint_pmf(2, 0, Hypothesis.H1, DET, corr)
    se = np.sqrt(p * (1 - p) / 1e7)
    assert abs(hits / 1e7 - p) < 3 * se


@pytest.mark.parametrize("truth", [Hypothesis.H0, Hypothesis.H1])
def test_count_frequencies_match_pmf(truth):
    """Ones-count histogram vs C(n,s) * joint pmf, every n <= 12, 10^7 draws each."""
    corr = CorrelationSpec(0.3, 0.3)
    rng = np.random.default_rng(14 + int(truth))
    draws, chunk = 10_000_000, 1_000_000
    worst = 0.0
    for n in range(1, 13):
        hist = np.zeros(n + 1)
        for _ in range(draws // chunk):
            x = draw_decision_matrix(n, truth, DET, corr, rng, chunk)
            hist += np.bincount(x.sum(axis=1), minlength=n + 1)
        freq = hist / draws
        expected = np.array([comb(n, s) * joint_pmf(n, s, truth, DET, corr) for s in range(n + 1)])
        se = np.sqrt(expected * (1 - expected) / draws)
        z = np.abs(freq - expected) / np.where(se > 0, se, np.inf)
        worst = max(worst, float(z.max()))
    print(f"worst |z| = {worst:.3f}")
    assert worst < 3.0


def test_zero_correlation_independent():
    rng = np.random.default_rng(15)
    x = draw_decision_matrix(6, Hypothesis.H1, DET, CorrelationSpec.uniform(0.0), rng, 1_000_000)
    assert estimate_pairwise_correlation(x) == pytest.approx(0.0, abs=0.01)


def test_correlation_estimator_from_vectors():
    rng = np.random.default_rng(16)
    corr = CorrelationSpec.uniform(0.3)
    vectors = [draw_local_decisions(4, Hypothesis.H1, DET, corr, rng) for _ in range(20000)]
    assert estimate_pairwise_correlation(vectors) == pytest.approx(0.3, abs=0.03)


def test_correlation_undefined_for_constant_vectors():
    with pytest.raises(ValueError, match="zero variance"):
        estimate_pairwise_correlation(np.ones((100, 3), dtype=np.uint8))


def test_draw_local_decisions_shape(rng):
    v = draw_local_decisions(7, Hypothesis.H0, DET, CorrelationSpec(0.5, 0.5), rng, channel_index=4)
    assert v.n == 7 and v.channel_index == 4
    assert set(np.unique(v.decisions)) <= {0, 1}


def test_mixed_correlation_modes(rng):
    # independent under H0, fully correlated under H1
    corr = CorrelationSpec(0.0, 1.0)
    x1 = draw_decision_matrix(5, Hypothesis.H1, DET, corr, rng, 2000)
    assert np.all(x1.min(axis=1) == x1.max(axis=1))
    x0 = draw_decision_matrix(5, Hypothesis.H0, DET, corr, rng, 200_000)
    assert x0.mean() == pytest.approx(0.05, abs=0.003)
