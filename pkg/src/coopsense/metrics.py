"""Accuracy of the un-occupancy estimates against ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class EstimateLog:
    """``estimates[i, m]`` is channel m's estimate after session i."""

    estimates: np.ndarray
    truth: np.ndarray

    def __post_init__(self) -> None:
        self.estimates = np.asarray(self.estimates, dtype=float)
        self.truth = np.asarray(self.truth, dtype=float)
        if self.estimates.ndim != 2 or self.estimates.shape[1] != len(self.truth):
            raise ValueError("estimate log must be (sessions, channels) matching the truth vector")

    @property
    def num_sessions(self) -> int:
        return self.estimates.shape[0]

    @property
    def num_channels(self) -> int:
        return self.estimates.shape[1]

    def window(self, start: int, stop: int | None = None) -> "EstimateLog":
        return EstimateLog(self.estimates[start:stop], self.truth)


def rmse(log: EstimateLog, channel: int) -> float:
    if log.num_sessions < 1:
        raise ValueError("need at least one session")
    residuals = log.estimates[:, channel] - log.truth[channel]
    return float(np.sqrt(np.mean(residuals**2)))


def rmse_all(log: EstimateLog) -> np.ndarray:
    if log.num_sessions < 1:
        raise ValueError("need at least one session")
    return np.sqrt(np.mean((log.estimates - log.truth) ** 2, axis=0))


def top_channels(truth, n: int) -> np.ndarray:
    """Indices of the ``n`` channels with the greatest true un-occupancy (ties: lowest index)."""
    truth = np.asarray(truth, dtype=float)
    if not 1 <= n <= len(truth):
        raise ValueError(f"n must lie in [1, {len(truth)}], got {n}")
    return np.argsort(-truth, kind="stable")[:n]


def rmse_me(log: EstimateLog, n: int) -> float:
    """Mean per-channel RMSE over the ``n`` most vacant channels."""
    omega = top_channels(log.truth, n)
    return float(np.mean(rmse_all(log)[omega]))
