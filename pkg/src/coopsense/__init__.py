"""Cooperative spectrum sensing simulator.

Sensing nodes each sense one of several licensed channels per session, fuse
their correlated binary verdicts, track every channel's mean un-occupancy and
re-allocate themselves to the channels that look most promising.
"""

from .channel_env import ChannelEnvironment, ChannelParams, SpectrumState, step_environment
from .config import RunConfig, load_config, parse_config_text
from .errors import AllocationError, ConfigError
from .estimation import EstimatorBank, EstimatorKind, EstimatorSettings, update_estimate
from .fusion import AdaptiveState, FusionKind, FusionPolicy, adaptive_feedback, lrt_lambda
from .metrics import EstimateLog, rmse, rmse_me
from .orchestration import Scheme, centralized_orchestrate, decentralized_select, kelly_allocate
from .sensing import CorrelationSpec, DecisionVector, DetectorProfile, Hypothesis, draw_local_decisions
from .simulation import ScenarioResult, compare_schemes, run_replications, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AdaptiveState", "AllocationError", "ChannelEnvironment", "ChannelParams", "ConfigError",
    "CorrelationSpec", "DecisionVector", "DetectorProfile", "EstimateLog", "EstimatorBank",
    "EstimatorKind", "EstimatorSettings", "FusionKind", "FusionPolicy", "Hypothesis", "RunConfig",
    "ScenarioResult", "Scheme", "SpectrumState", "adaptive_feedback", "centralized_orchestrate",
    "compare_schemes", "decentralized_select", "draw_local_decisions", "kelly_allocate",
    "load_config", "lrt_lambda", "parse_config_text", "rmse", "rmse_me", "run_replications",
    "run_scenario", "step_environment", "update_estimate",
]
