import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ema_steady_rmse, lma_steady_rmse

from coopsense.errors import ConfigError
from coopsense.estimation import (
    ChannelEstimate,
    EstimatorBank,
    EstimatorKind,
    EstimatorSettings,
    ema_update,
    lma_update,
    update_estimate,
)

EMA = EstimatorSettings(EstimatorKind.EMA, alpha=0.01, s_reset=0.5)


def _lma(window, o_w=4, s_reset=0.5):
    values = tuple(float(v) for v in window)
    return ChannelEstimate(
        s_hat=sum(values) / len(values), kind=EstimatorKind.LMA, s_reset=s_reset, o_w=o_w, window=values
    )


def test_ema_reset_fixed_point():
    est = ChannelEstimate.initial(EMA)
    assert ema_update(est, None).s_hat == pytest.approx(0.5)


@pytest.mark.parametrize("observation, expected", [(None, 0.797), (1.0, 0.802), (0.0, 0.792)])
def test_ema_examples(observation, expected):
    est = ChannelEstimate(0.8, alpha=0.01, s_reset=0.5)
    assert ema_update(est, observation).s_hat == pytest.approx(expected)


def test_ema_tracks_last_sensed_session():
    est = ChannelEstimate.initial(EMA)
    est = ema_update(est, 1.0, session=7)
    est = ema_update(est, None, session=8)
    assert est.last_sensed_session == 7


def test_lma_examples():
    assert lma_update(_lma([1, 1, 1, 1]), 1.0).s_hat == pytest.approx(1.0)
    est = lma_update(_lma([1, 0, 1, 0]), None)
    assert est.window == (0.0, 1.0, 0.0, 0.5)
    assert est.s_hat == pytest.approx(0.375)


def test_lma_startup_averages_what_exists():
    est = ChannelEstimate.initial(EstimatorSettings(EstimatorKind.LMA, o_w=40))
    est = lma_update(est, 1.0)
    assert est.s_hat == pytest.approx(1.0)
    est = lma_update(est, 0.0)
    assert est.s_hat == pytest.approx(0.5)


def test_kind_mismatch():
    with pytest.raises(ValueError):
        lma_update(ChannelEstimate.initial(EMA), 1.0)
    with pytest.raises(ValueError):
        ema_update(_lma([1]), 1.0)


@pytest.mark.parametrize(
    "kwargs", [dict(alpha=0.0), dict(alpha=1.0), dict(s_reset=1.5), dict(o_w=0)]
)
def test_settings_validation(kwargs):
    with pytest.raises(ConfigError):
        EstimatorSettings(**kwargs)


@settings(max_examples=80, deadline=None)
@given(
    kind=st.sampled_from(list(EstimatorKind)),
    alpha=st.floats(0.001, 0.999),
    s_reset=st.floats(0.0, 1.0),
    o_w=st.integers(1, 60),
    obs=st.lists(st.one_of(st.none(), st.sampled_from([0.0, 1.0])), max_size=200),
)
def test_estimate_stays_in_unit_interval(kind, alpha, s_reset, o_w, obs):
    est = ChannelEstimate.initial(EstimatorSettings(kind, alpha, s_reset, o_w))
    for t, value in enumerate(obs):
        est = update_estimate(est, value, t)
        assert -1e-12 <= est.s_hat <= 1 + 1e-12
        assert len(est.window) <= o_w


@pytest.mark.parametrize("kind", list(EstimatorKind))
def test_bank_matches_per_channel_updates(kind):
    settings_ = EstimatorSettings(kind, alpha=0.05, s_reset=0.4, o_w=7)
    rng = np.random.default_rng(5)
    bank = EstimatorBank(settings_, 4)
    singles = [ChannelEstimate.initial(settings_) for _ in range(4)]
    for t in range(60):
        obs = rng.integers(0, 2, 4).astype(float)
        sensed = rng.random(4) < 0.6
        out = bank.update(obs, sensed)
        for c in range(4):
            singles[c] = update_estimate(singles[c], obs[c] if sensed[c] else None, t)
        np.testing.assert_allclose(out, [e.s_hat for e in singles], rtol=0, atol=1e-12)
    assert bank.estimate(2).s_hat == pytest.approx(singles[2].s_hat)


@pytest.mark.parametrize("kind", list(EstimatorKind))
def test_never_sensed_converges_to_reset(kind):
    settings_ = EstimatorSettings(kind, alpha=0.01, s_reset=0.3, o_w=40)
    bank = EstimatorBank(settings_, 1)
    bank.update(np.array([1.0]), np.array([True]))
    for _ in range(40):
        out = bank.update(np.zeros(1), np.array([False]))
    if kind is EstimatorKind.LMA:
        assert out[0] == pytest.approx(0.3, abs=1e-12)
    else:
        for _ in range(5000):
            out = bank.update(np.zeros(1), np.array([False]))
        assert out[0] == pytest.approx(0.3, abs=1e-12)


def _bernoulli_feed(s, sessions, settings_, seed):
    rng = np.random.default_rng(seed)
    bank = EstimatorBank(settings_, 1)
    obs = (rng.random(sessions) < s).astype(float)
    sensed = np.array([True])
    return np.array([bank.update(obs[t : t + 1], sensed)[0] for t in range(sessions)])


def test_ema_converges():
    trace = _bernoulli_feed(0.7, 10_000, EMA, seed=1)
    assert abs(trace[-1000:].mean() - 0.7) <= 0.02


def test_lma_steady_state_rmse_matches_binomial_oracle():
    settings_ = EstimatorSettings(EstimatorKind.LMA, o_w=40)
    reps = 20
    values = []
    for r in range(reps):
        trace = _bernoulli_feed(0.7, 10_000, settings_, seed=100 + r)
        values.append(np.sqrt(np.mean((trace[40:] - 0.7) ** 2)))
    mean = np.mean(values)
    se = np.std(values, ddof=1) / np.sqrt(reps)
    assert abs(mean - lma_steady_rmse(0.7, 40)) < 2 * se + 1e-4
    assert lma_steady_rmse(0.7, 40) == pytest.approx(0.0725, abs=5e-5)


def test_ema_steady_state_rmse_matches_oracle():
    trace = _bernoulli_feed(0.7, 50_000, EMA, seed=3)
    assert np.sqrt(np.mean((trace[2000:] - 0.7) ** 2)) == pytest.approx(ema_steady_rmse(0.7, 0.01), rel=0.1)
