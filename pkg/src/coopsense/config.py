"""Run configuration and its flat ``section.key = value`` file format.

Example::

    # eight nodes, centralized orchestration with OR fusion
    run.nodes = 8
    run.seed = 7
    fusion.kind = or
    orchestration.scheme = centralized

Recognised keys and defaults are listed in :data:`SCHEMA`. Unknown keys,
duplicate keys and unparsable values are errors.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

from .channel_env import ChannelParams, default_channel_params
from .errors import ConfigError
from .estimation import EstimatorKind, EstimatorSettings
from .fusion import AdaptiveState, FusionKind, FusionPolicy
from .orchestration import Scheme
from .sensing import CorrelationSpec, DetectorProfile


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _optional(conv: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(text: str):
        return None if text.strip().lower() in ("", "none") else conv(text)

    return parse


# key -> (parser, default, description)
SCHEMA: dict[str, tuple[Callable[[str], Any], Any, str]] = {
    "run.channels": (int, 20, "number of channels M"),
    "run.nodes": (int, 10, "number of sensing nodes C"),
    "run.sessions": (int, 10000, "sensing sessions N per replication"),
    "run.seed": (int, 1, "master seed (unsigned 64-bit)"),
    "run.replications": (int, 1, "independent replications"),
    "run.workers": (int, 1, "worker processes for replications"),
    "run.top_n": (_optional(int), None, "n in RMSE_ME(n); none = min(5, M)"),
    "detector.p_d": (float, 0.9, "local probability of detection"),
    "detector.p_fa": (float, 0.05, "local probability of false alarm"),
    "correlation.rho0": (float, 0.5, "pairwise decision correlation under H0"),
    "correlation.rho1": (float, 0.5, "pairwise decision correlation under H1"),
    "channels.unoccupancy": (_optional(_floats), None, "comma list of mean un-occupancies"),
    "channels.mean_on": (_optional(_floats), None, "comma list of mean On sojourns (sessions)"),
    "channels.mean_off": (_optional(_floats), None, "comma list of mean Off sojourns (sessions)"),
    "channels.cycle": (_optional(float), None, "mean On+Off period; none = memoryless"),
    "fusion.kind": (str, "adaptive", "or | and | count | optimal | adaptive"),
    "fusion.k": (_optional(int), None, "threshold for the count rule"),
    "fusion.lambda": (_optional(float), None, "LRT threshold for the optimal rule"),
    "fusion.gamma": (float, 0.5, "randomisation probability at the LRT threshold"),
    "fusion.window": (int, 100, "adaptive rule observation window O_W (sessions)"),
    "fusion.pfa_bound": (float, 0.05, "global false-alarm bound behind both thresholds"),
    "fusion.initial_k": (_optional(int), None, "adaptive starting k; none = ceil(n/2)"),
    "fusion.md_threshold": (_optional(float), None, "override misdetection threshold"),
    "fusion.oc_threshold": (_optional(float), None, "override occupied-detection threshold"),
    "fusion.oc_mode": (str, "false_alarm", "false_alarm | detection"),
    "fusion.fallback": (str, "or", "rule used when adaptive is unavailable: or | and | <k>"),
    "estimator.kind": (str, "ema", "ema | lma"),
    "estimator.alpha": (float, 0.01, "EMA forgetting factor"),
    "estimator.s_reset": (float, 0.5, "value fed for unsensed channels"),
    "estimator.window": (int, 40, "LMA observation window O_W"),
    "orchestration.scheme": (str, "centralized", "centralized | decentralized | round-robin | hybrid-failover"),
    "orchestration.failover_session": (int, 5000, "first decentralized session in hybrid-failover"),
}


def parse_rule(text: str) -> FusionPolicy:
    """``or``, ``and``, ``adaptive``, ``count:K`` (or bare ``K``) or ``optimal:LAMBDA``."""
    text = text.strip().lower()
    name, _, arg = text.partition(":")
    try:
        if name in ("or", "and", "adaptive") and not arg:
            return FusionPolicy(FusionKind(name))
        if name == "count":
            return FusionPolicy.count(int(arg))
        if name == "optimal":
            return FusionPolicy(FusionKind.OPTIMAL, lam=float(arg))
        if not arg:
            return FusionPolicy.count(int(name))
    except ValueError:
        pass
    raise ConfigError(f"cannot parse fusion rule {text!r}")


@dataclass(frozen=True)
class FusionSettings:
    policy: FusionPolicy = field(default_factory=lambda: FusionPolicy(FusionKind.ADAPTIVE))
    window: int = 100
    pfa_bound: float = 0.05
    initial_k: int | None = None
    md_threshold: float | None = None
    oc_threshold: float | None = None
    oc_mode: str = "false_alarm"
    fallback: FusionPolicy = field(default_factory=FusionPolicy.or_rule)

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ConfigError("fusion.window must be >= 1")
        if not 0 < self.pfa_bound < 1:
            raise ConfigError("fusion.pfa_bound must lie in (0, 1)")
        if self.oc_mode not in ("false_alarm", "detection"):
            raise ConfigError(f"fusion.oc_mode must be false_alarm or detection, got {self.oc_mode!r}")
        if self.fallback.kind in (FusionKind.ADAPTIVE, FusionKind.OPTIMAL):
            raise ConfigError("fallback rule must be a counting rule")

    def new_adaptive_state(self, n: int) -> AdaptiveState:
        return AdaptiveState.create(
            n,
            o_w=self.window,
            pfa_bound=self.pfa_bound,
            k=self.initial_k,
            md_threshold=self.md_threshold,
            oc_threshold=self.oc_threshold,
            oc_mode=self.oc_mode,
        )


@dataclass(frozen=True)
class RunConfig:
    num_channels: int = 20
    num_nodes: int = 10
    sessions: int = 10000
    seed: int = 1
    replications: int = 1
    workers: int = 1
    top_n: int | None = None
    detector: DetectorProfile = field(default_factory=lambda: DetectorProfile(0.9, 0.05))
    correlation: CorrelationSpec = field(default_factory=lambda: CorrelationSpec(0.5, 0.5))
    channels: tuple[ChannelParams, ...] | None = None
    channel_cycle: float | None = None
    fusion: FusionSettings = field(default_factory=FusionSettings)
    estimator: EstimatorSettings = field(default_factory=EstimatorSettings)
    scheme: Scheme = Scheme.CENTRALIZED
    failover_session: int = 5000

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.num_nodes < 1:
            raise ConfigError("no sensing nodes")
        if self.num_channels < 1:
            raise ConfigError("need at least one channel")
        if self.sessions < 1:
            raise ConfigError("need at least one session")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.replications < 1:
            raise ConfigError("need at least one replication")
        if self.workers < 1:
            raise ConfigError("need at least one worker")
        if self.top_n is None:
            object.__setattr__(self, "top_n", min(5, self.num_channels))
        if not 1 <= self.top_n <= self.num_channels:
            raise ConfigError(f"run.top_n must lie in [1, {self.num_channels}]")
        if self.channels is not None and len(self.channels) != self.num_channels:
            raise ConfigError(
                f"{len(self.channels)} channel parameter sets given for {self.num_channels} channels"
            )
        if self.scheme is Scheme.DECENTRALIZED and self.fusion.policy.kind is FusionKind.ADAPTIVE:
            raise ConfigError(
                "adaptive fusion needs a known sensor count per channel; "
                "it cannot be used with decentralized orchestration"
            )
        if self.scheme is Scheme.HYBRID and not 0 <= self.failover_session <= self.sessions:
            raise ConfigError("orchestration.failover_session must lie in [0, run.sessions]")

    def channel_params(self) -> list[ChannelParams]:
        if self.channels is not None:
            return list(self.channels)
        return default_channel_params(self.num_channels, self.channel_cycle)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def with_rule(self, policy: FusionPolicy) -> "RunConfig":
        return self.replace(fusion=dataclasses.replace(self.fusion, policy=policy))

    # -- serialisation ----------------------------------------------------

    @classmethod
    def from_mapping(cls, values: Mapping[str, str]) -> "RunConfig":
        unknown = sorted(set(values) - set(SCHEMA))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        v: dict[str, Any] = {}
        for key, (conv, default, _) in SCHEMA.items():
            if key in values:
                try:
                    v[key] = conv(values[key])
                except ValueError as exc:
                    raise ConfigError(f"{key}: cannot parse {values[key]!r} ({exc})") from None
            else:
                v[key] = default

        m = v["run.channels"]
        channels = None
        explicit_durations = v["channels.mean_on"] is not None or v["channels.mean_off"] is not None
        if explicit_durations:
            if v["channels.unoccupancy"] is not None:
                raise ConfigError("give either channels.unoccupancy or channels.mean_on/mean_off, not both")
            on, off = v["channels.mean_on"], v["channels.mean_off"]
            if on is None or off is None or len(on) != len(off):
                raise ConfigError("channels.mean_on and channels.mean_off must be lists of equal length")
            channels = tuple(ChannelParams(a, b) for a, b in zip(on, off))
        elif v["channels.unoccupancy"] is not None:
            channels = tuple(
                ChannelParams.from_unoccupancy(s, v["channels.cycle"]) for s in v["channels.unoccupancy"]
            )
        if channels is not None and len(channels) != m:
            raise ConfigError(f"{len(channels)} channels listed but run.channels = {m}")

        kind = v["fusion.kind"].strip().lower()
        try:
            fk = FusionKind(kind)
        except ValueError:
            raise ConfigError(f"unknown fusion.kind {kind!r}") from None
        policy = FusionPolicy(fk, k=v["fusion.k"], lam=v["fusion.lambda"], gamma=v["fusion.gamma"])

        try:
            est_kind = EstimatorKind(v["estimator.kind"].strip().lower())
            scheme = Scheme(v["orchestration.scheme"].strip().lower())
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

        return cls(
            num_channels=m,
            num_nodes=v["run.nodes"],
            sessions=v["run.sessions"],
            seed=v["run.seed"],
            replications=v["run.replications"],
            workers=v["run.workers"],
            top_n=v["run.top_n"],
            detector=DetectorProfile(v["detector.p_d"], v["detector.p_fa"]),
            correlation=CorrelationSpec(v["correlation.rho0"], v["correlation.rho1"]),
            channels=channels,
            channel_cycle=v["channels.cycle"],
            fusion=FusionSettings(
                policy=policy,
                window=v["fusion.window"],
                pfa_bound=v["fusion.pfa_bound"],
                initial_k=v["fusion.initial_k"],
                md_threshold=v["fusion.md_threshold"],
                oc_threshold=v["fusion.oc_threshold"],
                oc_mode=v["fusion.oc_mode"].strip().lower(),
                fallback=parse_rule(v["fusion.fallback"]),
            ),
            estimator=EstimatorSettings(
                kind=est_kind,
                alpha=v["estimator.alpha"],
                s_reset=v["estimator.s_reset"],
                o_w=v["estimator.window"],
            ),
            scheme=scheme,
            failover_session=v["orchestration.failover_session"],
        )

    def to_mapping(self) -> dict[str, str]:
        """Inverse of :meth:`from_mapping` (channels written as explicit durations)."""
        policy = self.fusion.policy
        fallback = self.fusion.fallback
        params = self.channel_params()

        def opt(x) -> str:
            return "none" if x is None else repr(x)

        return {
            "run.channels": str(self.num_channels),
            "run.nodes": str(self.num_nodes),
            "run.sessions": str(self.sessions),
            "run.seed": str(self.seed),
            "run.replications": str(self.replications),
            "run.workers": str(self.workers),
            "run.top_n": str(self.top_n),
            "detector.p_d": repr(self.detector.p_d),
            "detector.p_fa": repr(self.detector.p_fa),
            "correlation.rho0": repr(self.correlation.rho0),
            "correlation.rho1": repr(self.correlation.rho1),
            "channels.mean_on": ", ".join(repr(p.mean_on_duration) for p in params),
            "channels.mean_off": ", ".join(repr(p.mean_off_duration) for p in params),
            "fusion.kind": policy.kind.value,
            "fusion.k": opt(policy.k),
            "fusion.lambda": opt(policy.lam),
            "fusion.gamma": repr(policy.gamma),
            "fusion.window": str(self.fusion.window),
            "fusion.pfa_bound": repr(self.fusion.pfa_bound),
            "fusion.initial_k": opt(self.fusion.initial_k),
            "fusion.md_threshold": opt(self.fusion.md_threshold),
            "fusion.oc_threshold": opt(self.fusion.oc_threshold),
            "fusion.oc_mode": self.fusion.oc_mode,
            "fusion.fallback": fallback.kind.value if fallback.kind is not FusionKind.COUNT else str(fallback.k),
            "estimator.kind": self.estimator.kind.value,
            "estimator.alpha": repr(self.estimator.alpha),
            "estimator.s_reset": repr(self.estimator.s_reset),
            "estimator.window": str(self.estimator.o_w),
            "orchestration.scheme": self.scheme.value,
            "orchestration.failover_session": str(self.failover_session),
        }


def parse_config_mapping(text: str) -> dict[str, str]:
    """Raw ``key -> value`` strings of a config file, without validation."""
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
        interpolation=None, strict=True,
    )
    parser.optionxform = str  # keep key case so typos are reported verbatim
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    return dict(parser["config"])


def parse_config_text(text: str) -> RunConfig:
    return RunConfig.from_mapping(parse_config_mapping(text))


def read_config_mapping(path: str | Path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from None
    return parse_config_mapping(text)


def load_config(path: str | Path) -> RunConfig:
    return RunConfig.from_mapping(read_config_mapping(path))


def dump_config(config: RunConfig) -> str:
    lines = [f"{key} = {value}" for key, value in config.to_mapping().items()]
    return "\n".join(lines) + "\n"
