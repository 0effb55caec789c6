"""Ground-truth channel occupancy: per-channel discrete-time On/Off processes.

Each channel alternates between occupied (H1) and vacant (H0) sojourns whose
lengths are geometric with configurable means, the memoryless discrete-time
counterpart of a Poisson On-Off source. One call to :func:`step_environment`
advances every channel by one sensing session.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ChannelParams:
    """Mean On (occupied) and Off (vacant) sojourn lengths, in sessions."""

    mean_on_duration: float
    mean_off_duration: float

    def __post_init__(self) -> None:
        for name in ("mean_on_duration", "mean_off_duration"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
            # a geometric sojourn on {1, 2, ...} cannot have a mean below one session
            if value < 1 - 1e-9:  # tolerate rounding in derived durations
                raise ConfigError(f"{name} must be at least one session, got {value!r}")

    @classmethod
    def from_unoccupancy(cls, s: float, cycle: float | None = None) -> "ChannelParams":
        """Build parameters whose stationary vacant fraction is ``s``.

        With ``cycle=None`` the process is memoryless across sessions
        (mean_on = 1/s, mean_off = 1/(1-s)), i.e. the occupancy of each session
        is an independent Bernoulli draw. Otherwise ``cycle`` is the mean
        On+Off period length.
        """
        if not 0 < s < 1:
            raise ConfigError(f"un-occupancy must lie in (0, 1), got {s!r}")
        if cycle is None:
            return cls(1.0 / s, 1.0 / (1.0 - s))
        return cls((1.0 - s) * cycle, s * cycle)


def true_unoccupancy(params: ChannelParams) -> float:
    """Long-run fraction of sessions the channel is vacant."""
    return params.mean_off_duration / (params.mean_on_duration + params.mean_off_duration)


def default_channel_params(num_channels: int, cycle: float | None = None) -> list[ChannelParams]:
    """Channels with mean un-occupancy evenly spaced over [0.1, 0.9].

    A single channel sits in the middle of the range (0.5).
    """
    if num_channels < 1:
        raise ConfigError("need at least one channel")
    if num_channels == 1:
        levels = [0.5]
    else:
        levels = np.linspace(0.1, 0.9, num_channels).tolist()
    return [ChannelParams.from_unoccupancy(s, cycle) for s in levels]


@dataclass
class SpectrumState:
    """Occupancy flags of all channels at one session (True = occupied, H1)."""

    states: np.ndarray
    session_index: int = 0

    @property
    def num_channels(self) -> int:
        return len(self.states)


@dataclass
class _Rates:
    leave_on: np.ndarray
    leave_off: np.ndarray


@dataclass
class ChannelEnvironment:
    """Vectorised ground-truth process for ``M`` channels.

    Holds the transition probabilities once so the simulator's per-session
    step is two array operations.
    """

    params: Sequence[ChannelParams]
    _rates: _Rates = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.params = list(self.params)
        if not self.params:
            raise ConfigError("need at least one channel")
        self._rates = _Rates(
            leave_on=np.array([1.0 / p.mean_on_duration for p in self.params]),
            leave_off=np.array([1.0 / p.mean_off_duration for p in self.params]),
        )

    @property
    def num_channels(self) -> int:
        return len(self.params)

    @property
    def unoccupancy(self) -> np.ndarray:
        return np.array([true_unoccupancy(p) for p in self.params])

    def initial_state(self, rng: np.random.Generator) -> SpectrumState:
        """Draw session 0 from the stationary distribution."""
        occupied = rng.random(self.num_channels) >= self.unoccupancy
        return SpectrumState(occupied, 0)

    def step(self, state: SpectrumState, rng: np.random.Generator) -> SpectrumState:
        leave = np.where(state.states, self._rates.leave_on, self._rates.leave_off)
        flip = rng.random(self.num_channels) < leave
        return SpectrumState(state.states ^ flip, state.session_index + 1)

    def trajectory(self, sessions: int, rng: np.random.Generator) -> np.ndarray:
        """Occupancy of sessions 0..sessions-1 as a (sessions, M) bool array.

        Consumes ``rng`` exactly like :meth:`initial_state` followed by
        ``sessions - 1`` calls to :meth:`step`, so both paths agree.
        """
        out = np.empty((sessions, self.num_channels), dtype=bool)
        out[0] = self.initial_state(rng).states
        if sessions > 1:
            u = rng.random((sessions - 1, self.num_channels))
            on, off = self._rates.leave_on, self._rates.leave_off
            for t in range(1, sessions):
                prev = out[t - 1]
                out[t] = prev ^ (u[t - 1] < np.where(prev, on, off))
        return out


def step_environment(
    state: SpectrumState, params: Sequence[ChannelParams], rng: np.random.Generator
) -> SpectrumState:
    """Advance every channel by one session.

    Each channel independently ends its current sojourn with probability
    1/mean, so sojourn lengths are geometric with the configured means.
    """
    if len(params) != state.num_channels:
        raise ConfigError(
            f"got {len(params)} channel parameter sets for {state.num_channels} channels"
        )
    return ChannelEnvironment(params).step(state, rng)
