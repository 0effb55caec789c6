"""Reusable experiment harnesses behind the figures and acceptance checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel_env import ChannelEnvironment, ChannelParams, default_channel_params
from .config import RunConfig
from .estimation import EstimatorBank, EstimatorKind, EstimatorSettings
from .fusion import FusionPolicy
from .metrics import EstimateLog, rmse_all
from .sensing import CorrelationSpec
from .simulation import make_streams, map_replications, run_scenario


def single_channel_config(base: RunConfig, sensors: int, rho: float) -> RunConfig:
    """``sensors`` nodes permanently on one channel of mean un-occupancy 0.5."""
    return base.replace(
        num_channels=1,
        num_nodes=sensors,
        top_n=1,
        channels=None,
        correlation=CorrelationSpec.uniform(rho),
    )


@dataclass(frozen=True)
class RuleScore:
    rule: str
    decision_rmse: tuple[float, ...]
    estimate_rmse: tuple[float, ...]


def _rule_job(args) -> tuple[float, float]:
    config, replication, burn_in = args
    result = run_scenario(config, replication)
    return result.decision_rmse(0, start=burn_in), float(result.channel_rmse(start=burn_in)[0])


def fusion_rule_experiment(
    base: RunConfig,
    sensors: int,
    rho: float,
    rules: Sequence[FusionPolicy],
    replications: int,
    burn_in: int = 1000,
    workers: int = 1,
) -> list[RuleScore]:
    """Steady-state accuracy of each fusion rule on a single channel.

    Decision RMSE compares the fused verdict with the true state; estimate
    RMSE compares the running un-occupancy estimate with its true value.
    Sessions before ``burn_in`` are discarded. Replication r uses the same
    streams for every rule.
    """
    cfg = single_channel_config(base, sensors, rho)
    jobs = [(cfg.with_rule(rule), r, burn_in) for rule in rules for r in range(replications)]
    out = map_replications(_rule_job, jobs, workers)
    scores = []
    for i, rule in enumerate(rules):
        chunk = out[i * replications : (i + 1) * replications]
        scores.append(
            RuleScore(rule.label, tuple(d for d, _ in chunk), tuple(e for _, e in chunk))
        )
    return scores


def estimator_experiment(
    params: Sequence[ChannelParams] | None = None,
    sessions: int = 10000,
    sensing_period: int = 1,
    alpha: float = 0.01,
    window: int = 40,
    s_reset: float = 0.5,
    seed: int = 1,
    replication: int = 0,
    burn_in: int = 0,
) -> dict[str, np.ndarray]:
    """Per-channel RMSE of the EMA and LMA estimators fed identical observations.

    Every channel is observed without error on sessions that are multiples of
    ``sensing_period``; in between both estimators receive ``s_reset``.
    """
    params = default_channel_params(20) if params is None else list(params)
    env = ChannelEnvironment(params)
    rng = make_streams(seed, replication)["environment"]
    truth = env.trajectory(sessions, rng)
    m = env.num_channels
    banks = {
        "ema": EstimatorBank(EstimatorSettings(EstimatorKind.EMA, alpha, s_reset, window), m),
        "lma": EstimatorBank(EstimatorSettings(EstimatorKind.LMA, alpha, s_reset, window), m),
    }
    logs = {name: np.empty((sessions, m)) for name in banks}
    all_sensed = np.ones(m, dtype=bool)
    none_sensed = np.zeros(m, dtype=bool)
    for t in range(sessions):
        sensed = all_sensed if t % sensing_period == 0 else none_sensed
        vacant = (~truth[t]).astype(float)
        for name, bank in banks.items():
            logs[name][t] = bank.update(vacant, sensed)
    return {
        name: rmse_all(EstimateLog(log[burn_in:], env.unoccupancy)) for name, log in logs.items()
    } | {"truth": env.unoccupancy}
