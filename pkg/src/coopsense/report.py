"""CSV output. Every numeric field is written with 9 significant digits."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .simulation import ComparisonRow, ScenarioResult, mean_and_stderr


def fmt(x: float) -> str:
    return f"{float(x):.9g}"


def _ints(values) -> str:
    return " ".join(str(int(v)) for v in values)


SESSION_FIELDS = [
    "replication", "session", "occupied", "assignment", "sensors", "ones", "fused", "k",
    "local_decisions", "detections", "misdetections", "false_alarms",
]


def write_sessions_csv(path: str | Path, results: Sequence[ScenarioResult]) -> None:
    """One summary row per (replication, session).

    ``occupied`` and ``fused`` are per-channel strings ('1' occupied/H1,
    '0' vacant/H0, '-' not sensed); ``assignment`` lists each node's channel.
    """
    m = results[0].estimates.shape[1]
    header = SESSION_FIELDS + [f"s_hat_{c}" for c in range(m)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for res in results:
            occ_str = np.where(res.occupied, "1", "0")
            fused_str = np.select([res.fused == 1, res.fused == 0], ["1", "0"], "-")
            sensed = res.fused >= 0
            detections = (res.fused == 1).sum(axis=1)
            missed = ((res.fused == 0) & res.occupied).sum(axis=1)
            false_alarms = ((res.fused == 1) & ~res.occupied).sum(axis=1)
            local = res.sensors.sum(axis=1)
            for t in range(len(res.estimates)):
                w.writerow(
                    [
                        res.replication,
                        t,
                        "".join(occ_str[t]),
                        _ints(res.assignments[t]),
                        _ints(res.sensors[t]),
                        _ints(res.ones[t]),
                        "".join(fused_str[t]),
                        _ints(np.where(sensed[t], res.k[t], 0)),
                        int(local[t]),
                        int(detections[t]),
                        int(missed[t]),
                        int(false_alarms[t]),
                    ]
                    + [fmt(v) for v in res.estimates[t]]
                )


METRIC_FIELDS = ["replication", "metric", "channel", "n", "true_unoccupancy", "value"]


def metrics_rows(results: Sequence[ScenarioResult], top_n: int) -> list[list[str]]:
    rows = []
    per_channel = []
    overall = []
    truth = results[0].truth
    for res in results:
        rm = res.channel_rmse()
        me = res.rmse_me(top_n)
        per_channel.append(rm)
        overall.append(me)
        for c, value in enumerate(rm):
            rows.append([str(res.replication), "rmse", str(c), "", fmt(truth[c]), fmt(value)])
        rows.append([str(res.replication), "rmse_me", "", str(top_n), "", fmt(me)])
    if len(results) > 1:
        per_channel = np.array(per_channel)
        for label, idx in (("mean", 0), ("stderr", 1)):
            for c in range(per_channel.shape[1]):
                stat = mean_and_stderr(per_channel[:, c])[idx]
                rows.append([label, "rmse", str(c), "", fmt(truth[c]), fmt(stat)])
            rows.append([label, "rmse_me", "", str(top_n), "", fmt(mean_and_stderr(overall)[idx])])
    return rows


def write_metrics_csv(path: str | Path, results: Sequence[ScenarioResult], top_n: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(METRIC_FIELDS)
        w.writerows(metrics_rows(results, top_n))


COMPARISON_FIELDS = ["scheme", "rule", "nodes", "replications", "rmse_me_mean", "rmse_me_stderr"]


def write_comparison_csv(path: str | Path, rows: Iterable[ComparisonRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COMPARISON_FIELDS)
        for row in rows:
            w.writerow([row.scheme, row.rule, row.nodes, len(row.values), fmt(row.mean), fmt(row.stderr)])
