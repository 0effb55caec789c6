"""Session-by-session simulation of the cooperative sensing cluster.

Every session runs sense -> broadcast -> fuse -> estimate -> choose. The
control channel is perfect, so every node receives every local decision and
all node views of the estimates coincide; one estimator bank stands for them
all.
"""

from __future__ import annotations

import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .channel_env import ChannelEnvironment
from .config import RunConfig
from .estimation import EstimatorBank
from .fusion import AdaptiveState, FusionKind, FusionPolicy, adaptive_feedback, lrt_table
from .metrics import EstimateLog, rmse_all, rmse_me
from .orchestration import (
    Scheme,
    centralized_orchestrate,
    decentralized_assign,
    random_assignment,
    round_robin_assignment,
)
from .sensing import HypothesisMixer

log = logging.getLogger(__name__)

STREAM_LABELS = ("environment", "sensing", "orchestration")


def make_streams(seed: int, replication: int) -> dict[str, np.random.Generator]:
    """Independent generators for one replication, keyed by fixed labels.

    The environment stream depends only on (seed, replication), so every
    scheme run with the same seed sees the same ground truth.
    """
    streams = {}
    for label in STREAM_LABELS:
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(replication, zlib.crc32(label.encode())))
        streams[label] = np.random.Generator(np.random.PCG64(ss))
    return streams


@dataclass(frozen=True)
class SessionRecord:
    session: int
    occupied: np.ndarray
    assignment: np.ndarray
    sensors: np.ndarray
    ones: np.ndarray
    fused: np.ndarray  # -1 where the channel was not sensed
    estimates: np.ndarray
    k: np.ndarray  # adaptive threshold used, 0 where none applies


@dataclass
class ScenarioResult:
    config: RunConfig
    replication: int
    truth: np.ndarray
    estimates: np.ndarray
    occupied: np.ndarray
    sensors: np.ndarray
    ones: np.ndarray
    fused: np.ndarray
    k: np.ndarray
    assignments: np.ndarray

    @property
    def log(self) -> EstimateLog:
        return EstimateLog(self.estimates, self.truth)

    def channel_rmse(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        return rmse_all(self.log.window(start, stop))

    def rmse_me(self, n: int | None = None, start: int = 0, stop: int | None = None) -> float:
        return rmse_me(self.log.window(start, stop), self.config.top_n if n is None else n)

    def decision_rmse(self, channel: int = 0, start: int = 0) -> float:
        """RMSE of the fused verdict against the true state over sensed sessions."""
        fused = self.fused[start:, channel]
        sensed = fused >= 0
        if not sensed.any():
            return math.nan
        err = fused[sensed] != self.occupied[start:, channel][sensed]
        return float(np.sqrt(err.mean()))

    def records(self) -> Iterator[SessionRecord]:
        for t in range(len(self.estimates)):
            yield SessionRecord(
                session=t,
                occupied=self.occupied[t],
                assignment=self.assignments[t],
                sensors=self.sensors[t],
                ones=self.ones[t],
                fused=self.fused[t],
                estimates=self.estimates[t],
                k=self.k[t],
            )


class _Fuser:
    """Per-channel fusion for one run; owns the adaptive states."""

    def __init__(self, config: RunConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.adaptive: list[AdaptiveState | None] = [None] * config.num_channels

    def fuse(
        self, policy: FusionPolicy, sensed_idx: np.ndarray, counts: np.ndarray, ones: np.ndarray,
        occupied: np.ndarray, session: int, k_out: np.ndarray,
    ) -> np.ndarray:
        """Verdicts (True = H1) for the sensed channels, in ``sensed_idx`` order."""
        n = counts[sensed_idx]
        o = ones[sensed_idx]
        kind = policy.kind
        if kind is FusionKind.OR:
            return o >= 1
        if kind is FusionKind.AND:
            return o >= n
        if kind is FusionKind.COUNT:
            return o >= np.clip(policy.k, 1, n)
        out = np.empty(len(sensed_idx), dtype=bool)
        if kind is FusionKind.OPTIMAL:
            cfg = self.config
            for j, (nj, oj) in enumerate(zip(n.tolist(), o.tolist())):
                ratio = lrt_table(nj, cfg.detector, cfg.correlation)[nj - oj]
                if ratio == policy.lam:
                    out[j] = self.rng.random() < policy.gamma
                else:
                    out[j] = ratio > policy.lam
            return out
        # adaptive: decide with the current k, then feed back the ground truth
        for j, (ch, nj, oj) in enumerate(zip(sensed_idx.tolist(), n.tolist(), o.tolist())):
            state = self.adaptive[ch]
            if state is None:
                state = self.adaptive[ch] = self.config.fusion.new_adaptive_state(nj)
            else:
                state.resize(nj)
            k_out[ch] = state.k
            verdict = oj >= state.k
            out[j] = verdict
            adaptive_feedback(state, verdict, bool(occupied[ch]), session)
        return out


def _scheme_at(config: RunConfig, session: int) -> Scheme:
    """Orchestration scheme that assigns nodes for ``session``."""
    if config.scheme is Scheme.HYBRID:
        return Scheme.CENTRALIZED if session < config.failover_session else Scheme.DECENTRALIZED
    return config.scheme


def _policy_at(config: RunConfig, session: int) -> FusionPolicy:
    policy = config.fusion.policy
    if _scheme_at(config, session) is Scheme.DECENTRALIZED and policy.kind is FusionKind.ADAPTIVE:
        return config.fusion.fallback
    return policy


def run_scenario(config: RunConfig, replication: int = 0) -> ScenarioResult:
    streams = make_streams(config.seed, replication)
    env_rng, sense_rng, orch_rng = (streams[label] for label in STREAM_LABELS)

    env = ChannelEnvironment(config.channel_params())
    M, C, N = config.num_channels, config.num_nodes, config.sessions
    mixer = HypothesisMixer(config.detector, config.correlation)

    bank = EstimatorBank(config.estimator, M)
    fuser = _Fuser(config, sense_rng)

    estimates = np.empty((N, M))
    sensors_log = np.empty((N, M), dtype=np.int16)
    ones_log = np.empty((N, M), dtype=np.int16)
    fused_log = np.full((N, M), -1, dtype=np.int8)
    k_log = np.zeros((N, M), dtype=np.int16)
    assign_log = np.empty((N, C), dtype=np.int16)

    if config.scheme is Scheme.ROUND_ROBIN:
        assignment = round_robin_assignment(0, C, M)
    else:
        assignment = random_assignment(C, M, orch_rng)

    truth = env.trajectory(N, env_rng)
    observations = np.zeros(M)
    for t in range(N):
        occ = truth[t]

        # sense: one common mixing probability per sensed channel, one verdict per node
        counts = np.bincount(assignment, minlength=M)
        sensed_idx = np.flatnonzero(counts)
        q = np.zeros(M)
        q[sensed_idx] = mixer.draw(occ[sensed_idx], sense_rng)
        local = sense_rng.random(C) < q[assignment]
        ones = np.bincount(assignment, weights=local, minlength=M).astype(np.int64)

        # fuse and estimate
        verdict = fuser.fuse(_policy_at(config, t), sensed_idx, counts, ones, occ, t, k_log[t])
        sensed = counts > 0
        observations[:] = 0.0
        observations[sensed_idx] = ~verdict
        s_hat = bank.update(observations, sensed)

        estimates[t] = s_hat
        sensors_log[t] = counts
        ones_log[t] = ones
        fused_log[t, sensed_idx] = verdict
        assign_log[t] = assignment

        # choose the channels for the next session
        nxt = t + 1
        scheme = _scheme_at(config, nxt)
        if scheme is Scheme.CENTRALIZED:
            assignment = centralized_orchestrate(s_hat, C, check=False)
        elif scheme is Scheme.DECENTRALIZED:
            assignment = decentralized_assign(s_hat, C, orch_rng, check=False)
        else:
            assignment = round_robin_assignment(nxt, C, M)

    return ScenarioResult(
        config=config,
        replication=replication,
        truth=env.unoccupancy,
        estimates=estimates,
        occupied=truth,
        sensors=sensors_log,
        ones=ones_log,
        fused=fused_log,
        k=k_log,
        assignments=assign_log,
    )


def _run_one(args: tuple[RunConfig, int]) -> ScenarioResult:
    config, replication = args
    return run_scenario(config, replication)


def map_replications(func, jobs: Sequence, workers: int = 1) -> list:
    """Apply ``func`` to every job, in order, optionally across processes."""
    if workers <= 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, jobs))


def run_replications(
    config: RunConfig, replications: int | None = None, workers: int | None = None
) -> list[ScenarioResult]:
    reps = config.replications if replications is None else replications
    jobs = [(config, r) for r in range(reps)]
    return map_replications(_run_one, jobs, config.workers if workers is None else workers)


def mean_and_stderr(values: Sequence[float]) -> tuple[float, float]:
    x = np.asarray(values, dtype=float)
    if len(x) < 2:
        return float(x.mean()), math.nan
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


@dataclass(frozen=True)
class ComparisonRow:
    scheme: str
    rule: str
    nodes: int
    values: tuple[float, ...]

    @property
    def mean(self) -> float:
        return mean_and_stderr(self.values)[0]

    @property
    def stderr(self) -> float:
        return mean_and_stderr(self.values)[1]


def _rmse_me_job(args: tuple[RunConfig, int]) -> float:
    config, replication = args
    return run_scenario(config, replication).rmse_me()


def compare_schemes(
    config: RunConfig,
    schemes: Sequence[Scheme | str],
    node_counts: Sequence[int],
    rules: Sequence[FusionPolicy] | None = None,
    replications: int | None = None,
    workers: int | None = None,
) -> list[ComparisonRow]:
    """RMSE_ME per (scheme, rule, node count) with common random numbers.

    Replication r of every cell uses the same seed streams, so cells differ
    only through the scheme, rule and node count. Combinations that are not
    allowed (adaptive fusion with decentralized orchestration) are skipped.
    """
    schemes = [Scheme(s) for s in schemes]
    rules = [config.fusion.policy] if rules is None else list(rules)
    reps = config.replications if replications is None else replications
    cells: list[tuple[Scheme, FusionPolicy, int, RunConfig]] = []
    for scheme in schemes:
        for rule in rules:
            if scheme is Scheme.DECENTRALIZED and rule.kind is FusionKind.ADAPTIVE:
                log.info("skipping adaptive fusion for decentralized orchestration")
                continue
            for c in node_counts:
                cells.append((scheme, rule, c, config.with_rule(rule).replace(scheme=scheme, num_nodes=c)))
    jobs = [(cfg, r) for *_, cfg in cells for r in range(reps)]
    values = map_replications(_rmse_me_job, jobs, config.workers if workers is None else workers)
    rows = []
    for i, (scheme, rule, c, _) in enumerate(cells):
        rows.append(ComparisonRow(scheme.value, rule.label, c, tuple(values[i * reps : (i + 1) * reps])))
    return rows
