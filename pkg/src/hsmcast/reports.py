"""Plot-ready CSV and machine-readable summary output.

Schemas (stable, consumed by scripts):

* cqi_histogram.csv: level,percent; mean share of users per reported level.
* subgroups_<policy>.csv: level,rate_kbps,codes,users; the first drop's final
  plan under that policy.
* gdi.csv: policy,drop,gdi_kbps,normalized_gdi,codes_used; per-drop means of
  the dissatisfaction series and the worst-case code usage.
* summary.json: config echo, seed derivation, per-policy aggregates.

Rates carry two decimals, normalized values six; rows are ordered so a rerun
with the same seed is byte-identical.
"""

from __future__ import annotations

import csv
import json
import os
from typing import List

from .scenario import CampaignResult, config_to_flat

HISTOGRAM_FILE = "cqi_histogram.csv"
SERIES_FILE = "gdi.csv"
SUMMARY_FILE = "summary.json"


def subgroups_file(policy_token: str) -> str:
    return f"subgroups_{policy_token}.csv"


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_histogram(result: CampaignResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["level", "percent"])
        for level, pct in enumerate(result.histogram_percent, start=1):
            w.writerow([level, f"{pct:.4f}"])


def write_subgroups(result: CampaignResult, token: str, path) -> None:
    plan = result.drops[0].per_policy[token].final_plan
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["level", "rate_kbps", "codes", "users"])
        for sl in plan.per_level:
            w.writerow([sl.level, f"{sl.rate_kbps:.2f}", sl.codes, sl.users])


def write_series(result: CampaignResult, tokens, path) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["policy", "drop", "gdi_kbps", "normalized_gdi", "codes_used"])
        for token in tokens:
            for drop in result.drops:
                m = drop.per_policy[token]
                w.writerow([
                    token,
                    drop.drop_index,
                    f"{m.mean_gdi_kbps:.2f}",
                    f"{m.mean_normalized:.6f}",
                    m.max_codes_used,
                ])


def write_summary(result: CampaignResult, tokens, path) -> None:
    payload = {
        "config": config_to_flat(result.config),
        "seeds": {
            "master": result.master_seed,
            "drop_spawn_keys": result.drop_spawn_keys,
        },
        "backend": result.backend,
        "drops": [
            {"drop": d.drop_index, "num_users": d.num_users,
             "elapsed_ms": d.elapsed_ms}
            for d in result.drops
        ],
        "policies": {
            token: {
                "mean_gdi_kbps": result.aggregates[token].mean_gdi_kbps,
                "std_gdi_kbps": result.aggregates[token].std_gdi_kbps,
                "mean_normalized_gdi": result.aggregates[token].mean_normalized,
                "std_normalized_gdi": result.aggregates[token].std_normalized,
                "mean_codes_used": result.aggregates[token].mean_codes_used,
                "max_codes_used": result.aggregates[token].max_codes_used,
            }
            for token in tokens
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_reports(result: CampaignResult, out_dir, tokens=None) -> List[str]:
    """Write every report file into out_dir; returns the paths written."""
    if tokens is None:
        tokens = sorted(result.aggregates)
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    path = os.path.join(out_dir, HISTOGRAM_FILE)
    write_histogram(result, path)
    paths.append(path)

    for token in tokens:
        path = os.path.join(out_dir, subgroups_file(token))
        write_subgroups(result, token, path)
        paths.append(path)

    path = os.path.join(out_dir, SERIES_FILE)
    write_series(result, tokens, path)
    paths.append(path)

    path = os.path.join(out_dir, SUMMARY_FILE)
    write_summary(result, tokens, path)
    paths.append(path)
    return paths
