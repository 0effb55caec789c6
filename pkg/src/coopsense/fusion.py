"""Hard-decision fusion of local sensor verdicts.

All rules here depend on a decision vector only through ``m``, the number of
sensors voting H0. Counting rules decide H1 when at least ``k`` sensors vote
H1 (``k = n - m0``); OR and AND are the ``k = 1`` and ``k = n`` extremes.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConfigError
from .sensing import CorrelationSpec, DetectorProfile, Hypothesis, joint_pmf


class FusionKind(str, Enum):
    OR = "or"
    AND = "and"
    COUNT = "count"
    OPTIMAL = "optimal"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class FusionPolicy:
    kind: FusionKind
    k: int | None = None
    lam: float | None = None
    gamma: float = 0.5

    def __post_init__(self) -> None:
        kind = FusionKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is FusionKind.COUNT and (self.k is None or self.k < 1):
            raise ConfigError("counting rule needs an integer threshold k >= 1")
        if kind is FusionKind.OPTIMAL:
            if self.lam is None or not self.lam > 0:
                raise ConfigError("optimal rule needs a positive threshold lambda")
            if not 0 <= self.gamma <= 1:
                raise ConfigError("gamma must lie in [0, 1]")

    @classmethod
    def or_rule(cls) -> "FusionPolicy":
        return cls(FusionKind.OR)

    @classmethod
    def and_rule(cls) -> "FusionPolicy":
        return cls(FusionKind.AND)

    @classmethod
    def count(cls, k: int) -> "FusionPolicy":
        return cls(FusionKind.COUNT, k=k)

    @property
    def label(self) -> str:
        if self.kind is FusionKind.COUNT:
            return f"count{self.k}"
        return self.kind.value

    def threshold(self, n: int) -> int:
        """Ones required for an H1 verdict with ``n`` sensors, clamped to [1, n]."""
        if self.kind is FusionKind.OR:
            return 1
        if self.kind is FusionKind.AND:
            return n
        if self.kind is FusionKind.COUNT:
            return min(max(self.k, 1), n)
        raise ValueError(f"{self.kind.value} rule has no fixed counting threshold")


def lrt_lambda(m: int, n: int, det: DetectorProfile, corr: CorrelationSpec) -> float:
    """Likelihood ratio P(u|H1) / P(u|H0) for any vector with ``m`` zeros.

    Returns ``inf`` when the vector is impossible under H0 (only with
    ``rho0 == 1`` and a mixed vector).
    """
    if not 0 <= m <= n:
        raise ValueError(f"m must lie in [0, {n}], got {m}")
    ones = n - m
    den = joint_pmf(n, ones, Hypothesis.H0, det, corr)
    if den == 0.0:
        return math.inf
    return joint_pmf(n, ones, Hypothesis.H1, det, corr) / den


@lru_cache(maxsize=256)
def lrt_table(n: int, det: DetectorProfile, corr: CorrelationSpec) -> tuple[float, ...]:
    """Λ(m) for m = 0..n."""
    return tuple(lrt_lambda(m, n, det, corr) for m in range(n + 1))


def decide_optimal(
    m: int,
    n: int,
    det: DetectorProfile,
    corr: CorrelationSpec,
    lam: float,
    gamma: float,
    rng: np.random.Generator,
) -> Hypothesis:
    ratio = lrt_table(n, det, corr)[m]
    if ratio > lam:
        return Hypothesis.H1
    if ratio == lam:
        return Hypothesis.H1 if rng.random() < gamma else Hypothesis.H0
    return Hypothesis.H0


def decide_counting(m: int, n: int, policy: FusionPolicy) -> Hypothesis:
    """H1 iff at least ``policy.threshold(n)`` of the ``n`` sensors vote H1."""
    return Hypothesis.H1 if n - m >= policy.threshold(n) else Hypothesis.H0


def counting_threshold(lam: float, n: int, det: DetectorProfile, corr: CorrelationSpec) -> int:
    """The ``k`` whose counting rule matches the LRT at threshold ``lam``.

    Relies on Λ(m) decreasing in ``m``. Raises ValueError when the LRT always
    or never decides H1, which no ``k`` in [1, n] reproduces.
    """
    table = lrt_table(n, det, corr)
    # largest zero-count the LRT still calls H1
    m0 = sum(1 for ratio in table if ratio > lam) - 1
    if not 0 <= m0 <= n - 1:
        raise ValueError(f"lambda={lam} gives m0={m0}; no counting rule with 1 <= k <= {n}")
    return n - m0


@dataclass
class _Event:
    session: int
    misdetection: bool
    occupied: bool


@dataclass
class AdaptiveState:
    """Mutable state of the adaptive counting rule for one fusion center.

    ``oc_mode`` picks what the occupied-detection counter counts:
    ``"false_alarm"`` counts H1 verdicts on a channel that was actually vacant,
    ``"detection"`` counts every H1 verdict.
    """

    k: int
    n: int
    o_w: int = 100
    md_threshold: float = 5.0
    oc_threshold: float = 5.0
    oc_mode: str = "false_alarm"
    md_counter: int = 0
    oc_counter: int = 0
    window: deque = field(default_factory=deque)
    clock: int = -1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError("adaptive rule needs at least one sensor")
        if self.o_w < 1:
            raise ConfigError("observation window must be at least one session")
        if self.oc_mode not in ("false_alarm", "detection"):
            raise ConfigError(f"unknown oc_mode {self.oc_mode!r}")
        self.k = min(max(self.k, 1), self.n)

    @classmethod
    def create(
        cls,
        n: int,
        o_w: int = 100,
        pfa_bound: float = 0.05,
        k: int | None = None,
        md_threshold: float | None = None,
        oc_threshold: float | None = None,
        oc_mode: str = "false_alarm",
    ) -> "AdaptiveState":
        """Initial state with thresholds ``pfa_bound * o_w`` and majority ``k``."""
        default = pfa_bound * o_w
        return cls(
            k=math.ceil(n / 2) if k is None else k,
            n=n,
            o_w=o_w,
            md_threshold=default if md_threshold is None else md_threshold,
            oc_threshold=default if oc_threshold is None else oc_threshold,
            oc_mode=oc_mode,
        )

    def resize(self, n: int) -> None:
        """Track a new sensor count, keeping ``k`` within [1, n]."""
        self.n = n
        self.k = min(max(self.k, 1), n)


def decide_adaptive(state: AdaptiveState, m: int, n: int) -> Hypothesis:
    k = min(max(state.k, 1), n)
    return Hypothesis.H1 if n - m >= k else Hypothesis.H0


def adaptive_feedback(
    state: AdaptiveState,
    decision: Hypothesis | int,
    true_state: Hypothesis | int,
    session: int | None = None,
) -> AdaptiveState:
    """Fold one verdict and its ground-truth outcome into ``state`` (in place).

    ``session`` defaults to one past the previous feedback call; events from
    ``o_w`` or more sessions ago leave the window.
    """
    state.clock = state.clock + 1 if session is None else session
    now = state.clock

    if decision:
        occupied = state.oc_mode == "detection" or not true_state
        misdetection = False
    else:
        occupied = False
        misdetection = bool(true_state)
    if occupied or misdetection:
        state.window.append(_Event(now, misdetection, occupied))
        state.md_counter += misdetection
        state.oc_counter += occupied

    if state.md_counter > state.md_threshold:
        state.k = max(state.k - 1, 1)
        _consume(state, "misdetection")
        state.md_counter = 0
    if state.oc_counter > state.oc_threshold:
        state.k = min(state.k + 1, state.n)
        _consume(state, "occupied")
        state.oc_counter = 0

    while state.window and state.window[0].session <= now - state.o_w:
        old = state.window.popleft()
        state.md_counter -= old.misdetection
        state.oc_counter -= old.occupied
    return state


def _consume(state: AdaptiveState, flag: str) -> None:
    for event in state.window:
        setattr(event, flag, False)
