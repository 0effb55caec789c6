"""Correlated local decisions of homogeneous sensors watching one channel.

Decisions of the ``n`` sensors on a channel are exchangeable Bernoulli
variables. Given the hypothesis, a common success probability ``q`` is drawn
from Beta(a, b) with

    a = p (1 - rho) / rho,    b = (1 - p) (1 - rho) / rho,

and each sensor then decides H1 independently with probability ``q``. Here
``p`` is the detection probability under H1 or the false-alarm probability
under H0, and ``rho`` is the matching pairwise correlation index. The marginal
is ``p`` and the pairwise correlation coefficient is ``1 / (a + b + 1) = rho``.
``rho = 0`` (independent sensors) and ``rho = 1`` (all sensors agree) are
the limits of this family and are handled explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from math import comb

import numpy as np

from .errors import ConfigError


class Hypothesis(IntEnum):
    H0 = 0  # vacant
    H1 = 1  # occupied


@dataclass(frozen=True)
class DetectorProfile:
    p_d: float
    p_fa: float

    def __post_init__(self) -> None:
        if not (0 < self.p_fa < 1 and 0 < self.p_d < 1):
            raise ConfigError(f"p_d and p_fa must lie in (0, 1), got {self.p_d}, {self.p_fa}")
        if self.p_d <= self.p_fa:
            raise ConfigError("p_d must exceed p_fa")

    def marginal(self, truth: Hypothesis | int) -> float:
        return self.p_d if truth else self.p_fa


@dataclass(frozen=True)
class CorrelationSpec:
    rho0: float
    rho1: float

    def __post_init__(self) -> None:
        for name in ("rho0", "rho1"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")

    @classmethod
    def uniform(cls, rho: float) -> "CorrelationSpec":
        return cls(rho, rho)

    def index(self, truth: Hypothesis | int) -> float:
        return self.rho1 if truth else self.rho0


@dataclass(frozen=True)
class DecisionVector:
    decisions: np.ndarray
    channel_index: int = 0

    @property
    def n(self) -> int:
        return len(self.decisions)

    @property
    def ones(self) -> int:
        return int(np.count_nonzero(self.decisions))

    @property
    def m(self) -> int:
        """Number of sensors in favour of H0."""
        return self.n - self.ones


def beta_parameters(p: float, rho: float) -> tuple[float, float]:
    """Beta mixing parameters for marginal ``p`` and correlation ``0 < rho < 1``."""
    scale = (1.0 - rho) / rho
    return p * scale, (1.0 - p) * scale


def joint_pmf(
    n: int,
    ones: int,
    truth: Hypothesis | int,
    det: DetectorProfile,
    corr: CorrelationSpec,
) -> float:
    """Probability of one particular decision vector of length ``n`` with ``ones`` ones."""
    if not 0 <= ones <= n:
        raise ValueError(f"ones must lie in [0, {n}], got {ones}")
    p = det.marginal(truth)
    rho = corr.index(truth)
    zeros = n - ones
    if rho == 0:
        return p**ones * (1.0 - p) ** zeros
    if rho == 1:
        if ones == n:
            return p
        if zeros == n:
            return 1.0 - p
        return 0.0
    # ratios (a+k)/(a+b+k) rewritten with a+b = (1-rho)/rho cleared, so tiny rho cannot overflow
    w = 1.0 - rho
    prob = 1.0
    for k in range(ones):
        prob *= (p * w + k * rho) / (w + k * rho)
    for k in range(zeros):
        prob *= ((1.0 - p) * w + k * rho) / (w + (ones + k) * rho)
    return prob


def count_pmf(n: int, truth: Hypothesis | int, det: DetectorProfile, corr: CorrelationSpec) -> np.ndarray:
    """Distribution of the number of ones, indexed 0..n."""
    return np.array([comb(n, s) * joint_pmf(n, s, truth, det, corr) for s in range(n + 1)])


class HypothesisMixer:
    """Draws the common success probability ``q`` of a channel's sensors.

    Parameters are resolved once per (detector, correlation) pair so a draw
    for many channels costs a handful of array operations.
    """

    def __init__(self, det: DetectorProfile, corr: CorrelationSpec):
        self.det = det
        self.corr = corr
        self._p = np.array([det.p_fa, det.p_d])
        rho = np.array([corr.rho0, corr.rho1])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            scale = (1.0 - rho) / rho
        # a correlation so small that the Beta parameters overflow is independence in practice
        mixed = (rho > 0.0) & (rho < 1.0) & np.isfinite(scale * self._p) & np.isfinite(scale * (1.0 - self._p))
        self._mode = np.where(rho >= 1.0, 2, np.where(mixed, 1, 0))
        scale = np.where(mixed, scale, 0.0)
        self._a = self._p * scale
        self._b = (1.0 - self._p) * scale
        self._uniform_mode = int(self._mode[0]) if self._mode[0] == self._mode[1] else None

    def draw(self, truth: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One ``q`` per entry of ``truth`` (an array of 0/1 hypotheses)."""
        h = np.asarray(truth, dtype=np.intp)
        mode = self._uniform_mode
        if mode == 1:
            return rng.beta(self._a[h], self._b[h])
        if mode == 0:
            return self._p[h]
        if mode == 2:
            return (rng.random(len(h)) < self._p[h]).astype(float)
        q = self._p[h]
        modes = self._mode[h]
        mixed = modes == 1
        if mixed.any():
            q[mixed] = rng.beta(self._a[h[mixed]], self._b[h[mixed]])
        perfect = modes == 2
        if perfect.any():
            q[perfect] = (rng.random(int(perfect.sum())) < q[perfect]).astype(float)
        return q


def draw_decision_matrix(
    n: int,
    truth: Hypothesis | int,
    det: DetectorProfile,
    corr: CorrelationSpec,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """``size`` independent decision vectors as a (size, n) uint8 array."""
    if n < 1:
        raise ValueError("need at least one sensor")
    q = HypothesisMixer(det, corr).draw(np.full(size, int(truth)), rng)
    return (rng.random((size, n)) < q[:, None]).astype(np.uint8)


def draw_local_decisions(
    n: int,
    truth: Hypothesis | int,
    det: DetectorProfile,
    corr: CorrelationSpec,
    rng: np.random.Generator,
    channel_index: int = 0,
) -> DecisionVector:
    return DecisionVector(draw_decision_matrix(n, truth, det, corr, rng, 1)[0], channel_index)


def estimate_pairwise_correlation(samples) -> float:
    """Average empirical correlation coefficient over all sensor pairs.

    ``samples`` is a (draws, n) array or an iterable of DecisionVector.
    Raises ValueError when a sensor's decisions have zero variance, where the
    coefficient is undefined.
    """
    if isinstance(samples, np.ndarray):
        x = samples.astype(float)
    else:
        x = np.array([np.asarray(v.decisions) for v in samples], dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("need vectors of at least two sensors")
    mean = x.mean(axis=0)
    centred = x - mean
    cov = centred.T @ centred / len(x)
    var = np.diag(cov)
    if np.any(var <= 0):
        raise ValueError("correlation undefined: a sensor has zero variance")
    corr = cov / np.sqrt(np.outer(var, var))
    n = x.shape[1]
    return float((corr.sum() - np.trace(corr)) / (n * (n - 1)))
