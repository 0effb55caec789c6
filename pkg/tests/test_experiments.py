import numpy as np
import pytest

from coopsense.config import RunConfig
from coopsense.experiments import estimator_experiment, fusion_rule_experiment, single_channel_config
from coopsense.fusion import FusionKind, FusionPolicy


def test_single_channel_config():
    cfg = single_channel_config(RunConfig(), 7, 0.3)
    assert (cfg.num_channels, cfg.num_nodes, cfg.top_n) == (1, 7, 1)
    assert cfg.correlation.rho0 == cfg.correlation.rho1 == 0.3
    assert cfg.channel_params()[0].mean_on_duration == pytest.approx(2.0)


@pytest.mark.parametrize("rho", [0.1, 0.5, 0.9])
def test_adaptive_rule_close_to_best_fixed_k(rho):
    base = RunConfig(sessions=4000)
    rules = [FusionPolicy.count(k) for k in range(1, 11)] + [FusionPolicy(FusionKind.ADAPTIVE)]
    scores = {s.rule: np.mean(s.decision_rmse) for s in fusion_rule_experiment(base, 10, rho, rules, 3)}
    adaptive = scores.pop("adaptive")
    assert adaptive <= min(scores.values()) + 0.02
    assert adaptive < max(scores["count1"], scores["count10"])


def test_rule_experiment_shares_streams_across_rules():
    base = RunConfig(sessions=1500)
    same = fusion_rule_experiment(base, 4, 0.5, [FusionPolicy.or_rule(), FusionPolicy.count(1)], 2)
    assert same[0].decision_rmse == same[1].decision_rmse
    assert same[0].rule == "or" and same[1].rule == "count1"


def test_estimator_experiment_shapes_and_ordering():
    res = estimator_experiment(sessions=3000)
    assert set(res) == {"ema", "lma", "truth"}
    assert res["ema"].shape == res["lma"].shape == (20,)
    gapped = estimator_experiment(sessions=3000, sensing_period=2)
    # reset pulls the extreme channels toward 0.5
    assert gapped["ema"][0] > res["ema"][0] and gapped["ema"][-1] > res["ema"][-1]
