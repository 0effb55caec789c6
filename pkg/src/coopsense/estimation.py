"""Running estimates of each channel's mean un-occupancy.

An observation is 1 when the fused verdict for the channel was H0 (vacant)
and 0 when it was H1. Sessions in which a channel is not sensed feed the
estimator ``s_reset`` instead, which pulls stale estimates toward a neutral
bid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import ConfigError


class EstimatorKind(str, Enum):
    EMA = "ema"
    LMA = "lma"


@dataclass(frozen=True)
class EstimatorSettings:
    kind: EstimatorKind = EstimatorKind.EMA
    alpha: float = 0.01
    s_reset: float = 0.5
    o_w: int = 40

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EstimatorKind(self.kind))
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= self.s_reset <= 1:
            raise ConfigError(f"s_reset must lie in [0, 1], got {self.s_reset}")
        if self.o_w < 1:
            raise ConfigError(f"observation window must be >= 1, got {self.o_w}")


@dataclass(frozen=True)
class ChannelEstimate:
    s_hat: float
    kind: EstimatorKind = EstimatorKind.EMA
    alpha: float = 0.01
    s_reset: float = 0.5
    o_w: int = 40
    window: tuple[float, ...] = ()
    last_sensed_session: int = -1

    @classmethod
    def initial(cls, settings: EstimatorSettings) -> "ChannelEstimate":
        return cls(
            s_hat=settings.s_reset,
            kind=settings.kind,
            alpha=settings.alpha,
            s_reset=settings.s_reset,
            o_w=settings.o_w,
        )


def ema_update(
    est: ChannelEstimate, observation: float | None, session: int | None = None
) -> ChannelEstimate:
    if est.kind is not EstimatorKind.EMA:
        raise ValueError("ema_update on a non-EMA estimate")
    value = est.s_reset if observation is None else float(observation)
    s_hat = (1.0 - est.alpha) * est.s_hat + est.alpha * value
    last = est.last_sensed_session if observation is None or session is None else session
    return replace(est, s_hat=s_hat, last_sensed_session=last)


def lma_update(
    est: ChannelEstimate, observation: float | None, session: int | None = None
) -> ChannelEstimate:
    if est.kind is not EstimatorKind.LMA:
        raise ValueError("lma_update on a non-LMA estimate")
    value = est.s_reset if observation is None else float(observation)
    window = (est.window + (value,))[-est.o_w :]
    last = est.last_sensed_session if observation is None or session is None else session
    return replace(est, s_hat=sum(window) / len(window), window=window, last_sensed_session=last)


def update_estimate(
    est: ChannelEstimate, observation: float | None, session: int | None = None
) -> ChannelEstimate:
    if est.kind is EstimatorKind.EMA:
        return ema_update(est, observation, session)
    return lma_update(est, observation, session)


@dataclass
class EstimatorBank:
    """Estimates for all ``M`` channels, updated together once per session.

    Numerically identical to applying :func:`update_estimate` channel by
    channel; exists so the simulator avoids per-channel Python work.
    """

    settings: EstimatorSettings
    num_channels: int
    s_hat: np.ndarray = field(init=False)
    _buffer: np.ndarray = field(init=False, repr=False)
    _filled: int = field(init=False, default=0)
    _head: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        self.s_hat = np.full(self.num_channels, self.settings.s_reset)
        if self.settings.kind is EstimatorKind.LMA:
            self._buffer = np.zeros((self.settings.o_w, self.num_channels))

    def update(self, observations: np.ndarray, sensed: np.ndarray) -> np.ndarray:
        """``observations[m]`` is used where ``sensed[m]``; elsewhere ``s_reset``."""
        values = np.where(sensed, observations, self.settings.s_reset)
        if self.settings.kind is EstimatorKind.EMA:
            a = self.settings.alpha
            self.s_hat = (1.0 - a) * self.s_hat + a * values
        else:
            ow = self.settings.o_w
            self._buffer[self._head] = values
            self._head = (self._head + 1) % ow
            self._filled = min(self._filled + 1, ow)
            # summing the buffer each session keeps results free of drift
            self.s_hat = self._buffer.sum(axis=0) / self._filled
        return self.s_hat

    def estimate(self, channel: int) -> ChannelEstimate:
        return ChannelEstimate(
            s_hat=float(self.s_hat[channel]),
            kind=self.settings.kind,
            alpha=self.settings.alpha,
            s_reset=self.settings.s_reset,
            o_w=self.settings.o_w,
        )
