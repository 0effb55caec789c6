"""Line charts of the standard experiments, written as SVG files."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .config import RunConfig  # noqa: E402
from .experiments import estimator_experiment, fusion_rule_experiment  # noqa: E402
from .fusion import FusionKind, FusionPolicy  # noqa: E402
from .orchestration import Scheme  # noqa: E402
from .simulation import compare_schemes, mean_and_stderr  # noqa: E402

log = logging.getLogger(__name__)

RHOS = (0.1, 0.3, 0.5, 0.9)

# fixed salt and no timestamp so identical data gives identical files
plt.rcParams["svg.hashsalt"] = "coopsense"


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    log.info("wrote %s", path)
    return path


def plot_rmse_vs_k(
    base: RunConfig, sensors: int, path: Path, rhos: Sequence[float] = RHOS,
    replications: int = 3, burn_in: int = 1000, workers: int = 1,
) -> Path:
    """Decision RMSE of the fixed k-out-of-n rule for every k, one line per rho."""
    ks = list(range(1, sensors + 1))
    rules = [FusionPolicy.count(k) for k in ks]
    fig, ax = plt.subplots(figsize=(6, 4))
    for rho in rhos:
        scores = fusion_rule_experiment(base, sensors, rho, rules, replications, burn_in, workers)
        ax.plot(ks, [np.mean(s.decision_rmse) for s in scores], marker="o", label=f"rho = {rho:g}")
    ax.set_xlabel("k (ones required for H1)")
    ax.set_ylabel("RMSE of fused decision")
    ax.set_title(f"k-out-of-{sensors} rule")
    ax.set_xticks(ks)
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_rule_comparison(
    base: RunConfig, path: Path, sensors: Sequence[int] = (5, 10), rhos: Sequence[float] = RHOS,
    replications: int = 3, burn_in: int = 1000, workers: int = 1,
) -> Path:
    rules = [FusionPolicy.or_rule(), FusionPolicy.and_rule(), FusionPolicy(FusionKind.ADAPTIVE)]
    fig, axes = plt.subplots(1, len(sensors), figsize=(5 * len(sensors), 4), squeeze=False)
    for ax, n in zip(axes[0], sensors):
        table = {rule.label: [] for rule in rules}
        for rho in rhos:
            for score in fusion_rule_experiment(base, n, rho, rules, replications, burn_in, workers):
                table[score.rule].append(np.mean(score.decision_rmse))
        for label, values in table.items():
            ax.plot(rhos, values, marker="o", label=label)
        ax.set_xlabel("decision correlation rho")
        ax.set_ylabel("RMSE of fused decision")
        ax.set_title(f"n = {n} sensors")
        ax.legend()
        ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_estimators(path: Path, sessions: int = 10000, seed: int = 1) -> Path:
    """Per-channel RMSE of EMA and LMA with every-session and every-other-session sensing."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for period, style in ((1, "-"), (2, "--")):
        res = estimator_experiment(sessions=sessions, sensing_period=period, seed=seed)
        for name in ("ema", "lma"):
            tag = "continuous" if period == 1 else "interrupted"
            ax.plot(res["truth"], res[name], style, marker="o", label=f"{name.upper()} {tag}")
    ax.set_xlabel("true mean un-occupancy")
    ax.set_ylabel("RMSE of estimate")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_scheme_sweep(
    base: RunConfig, scheme: Scheme, path: Path, nodes: Sequence[int] = tuple(range(4, 13)),
    replications: int = 3, workers: int = 1,
) -> Path:
    """RMSE_ME vs node count for one orchestration scheme, one line per fusion rule."""
    rules = [FusionPolicy.or_rule(), FusionPolicy.and_rule()]
    if scheme is not Scheme.DECENTRALIZED:
        rules.append(FusionPolicy(FusionKind.ADAPTIVE))
    rows = compare_schemes(base, [scheme], nodes, rules, replications, workers)
    fig, ax = plt.subplots(figsize=(6, 4))
    for rule in rules:
        sel = [r for r in rows if r.rule == rule.label]
        stats = [mean_and_stderr(r.values) for r in sel]
        ax.errorbar(
            [r.nodes for r in sel], [m for m, _ in stats],
            yerr=[0 if np.isnan(s) else s for _, s in stats], marker="o", capsize=3, label=rule.label,
        )
    ax.set_xlabel("number of sensing nodes")
    ax.set_ylabel(f"RMSE_ME({base.top_n})")
    ax.set_title(f"{scheme.value} orchestration")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def render_all(
    base: RunConfig, out: Path, replications: int = 3, workers: int = 1,
) -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    # drop the adaptive rule's start-up transient, but never the whole run
    fusion = dict(replications=replications, burn_in=min(1000, base.sessions // 2), workers=workers)
    paths = [
        plot_rmse_vs_k(base, 10, out / "rmse_vs_k_n10.svg", **fusion),
        plot_rmse_vs_k(base, 5, out / "rmse_vs_k_n5.svg", **fusion),
        plot_rule_comparison(base, out / "rmse_vs_rule.svg", **fusion),
        plot_estimators(out / "estimators.svg", sessions=base.sessions, seed=base.seed),
    ]
    for scheme in (Scheme.CENTRALIZED, Scheme.DECENTRALIZED):
        paths.append(
            plot_scheme_sweep(
                base, scheme, out / f"rmse_me_{scheme.value}.svg",
                replications=replications, workers=workers,
            )
        )
    return paths
