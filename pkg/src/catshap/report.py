"""JSON documents exchanged between CLI commands.

Field names are stable: ``order``, ``steps[].feature``, ``steps[].shapley``,
``steps[].penalty``, ``steps[].rk``, ``config.method``, ``config.epsilon``,
``config.base``, ``config.seed``. Every document also carries the dataset
fingerprint so consumers can refuse mismatched inputs.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .dataset import CategoricalDataset
from .entropy import base_label
from .metrics import RedundancyReport
from .ranking import RankingResult
from .shapley import ShapleyScores

SCHEMA_VERSION = 1


def _num(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else x


def dataset_info(ds: CategoricalDataset) -> dict:
    return {
        "name": ds.name,
        "fingerprint": ds.fingerprint,
        "n_rows": ds.n_rows,
        "n_features": ds.n_features,
        "feature_names": ds.feature_names,
    }


def scores_to_dict(scores: ShapleyScores) -> dict:
    out = {
        "values": [_num(v) for v in scores.values],
        "approx": str(scores.config),
        "n_value_evals": scores.n_value_evals,
    }
    if scores.std_errors is not None:
        out["std_errors"] = [_num(v) for v in scores.std_errors]
    return out


def ranking_to_dict(result: RankingResult, ds: CategoricalDataset) -> dict:
    names = ds.feature_names
    cfg = result.scores.config
    steps = []
    for s in result.steps:
        step = {
            "feature": s.feature,
            "name": names[s.feature],
            "shapley": s.shapley,
            "penalty": s.penalty,
            "rk": s.rk,
        }
        if result.method == "svfs":
            step["pruned"] = list(s.pruned)
        steps.append(step)
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "ranking" if result.method == "svfr" else "selection",
        "order": list(result.order),
        "names": [names[i] for i in result.order],
        "steps": steps,
        "config": {
            "method": result.method,
            "epsilon": result.epsilon,
            "cap": result.cap,
            "approx": str(cfg),
            "base": base_label(result.base),
            "seed": cfg.seed if cfg.method == "sampled" else None,
        },
        "dataset": dataset_info(ds),
        "shapley": scores_to_dict(result.scores),
    }
    if result.method == "svfs":
        doc["trailing_pruned"] = list(result.trailing_pruned)
    return doc


def redundancy_to_dict(report: RedundancyReport, ds: CategoricalDataset, selected) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "redundancy",
        "features": [int(i) for i in selected],
        "raw": report.raw,
        "mean_abs_pairwise": report.mean_abs_pairwise,
        "scaled_0_100": report.scaled_0_100,
        "normalizer": report.normalizer,
        "pairs": [{"i": i, "j": j, "rho": rho} for i, j, rho in report.pairs],
        "dataset": dataset_info(ds),
    }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_order(path: str | Path) -> tuple[list[int], dict]:
    """Read a ranking or selection document; returns ``(order, document)``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "order" not in doc:
        raise ValueError(f"{path}: not a ranking document (no 'order' field)")
    return [int(i) for i in doc["order"]], doc
