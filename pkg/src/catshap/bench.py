"""Run-time scaling of the Shapley estimators.

Timings are wall-clock medians over repetitions. Evaluation counts are
deterministic and are the reliable signal; slopes from timings are only
indicative on shared machines.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .dataset import CategoricalDataset
from .shapley import ApproxConfig, compute_shapley
from .synth import SynthSpec, generate


@dataclass(frozen=True)
class BenchRow:
    method: str
    n_features: int
    n_rows: int
    median_seconds: float
    evals: int


@dataclass
class BenchReport:
    axis: str
    rows: list[BenchRow] = field(default_factory=list)

    def slope(self) -> float:
        """Least-squares slope of log(time) against log(axis value)."""
        xs = [r.n_features if self.axis == "features" else r.n_rows for r in self.rows]
        ts = [max(r.median_seconds, 1e-9) for r in self.rows]
        if len(xs) < 2:
            raise ValueError("need at least two sizes to fit a slope")
        return float(np.polyfit(np.log(xs), np.log(ts), 1)[0])

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "N", "D", "median_seconds", "evals"])
            for r in self.rows:
                w.writerow([r.method, r.n_features, r.n_rows, f"{r.median_seconds:.6g}", r.evals])

    def write_gnuplot(self, path: str | Path) -> None:
        x = "N" if self.axis == "features" else "D"
        lines = [f"# {x} median_seconds evals  ({self.rows[0].method if self.rows else ''})"]
        for r in self.rows:
            v = r.n_features if self.axis == "features" else r.n_rows
            lines.append(f"{v} {r.median_seconds:.6g} {r.evals}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def synthetic_family(n_rows: int = 1000, arity: int = 4, seed: int = 0) -> Callable[[int], CategoricalDataset]:
    """Datasets of ``n`` features made of correlated triples plus a remainder."""

    def make(n_features: int) -> CategoricalDataset:
        groups = [(3, 0.3)] * (n_features // 3)
        spec = SynthSpec(tuple(groups), n_features % 3, arity, n_rows, seed)
        return generate(spec).dataset

    return make


def _time(ds: CategoricalDataset, config: ApproxConfig, reps: int, n_jobs: int):
    times, evals = [], 0
    for _ in range(reps):
        t0 = time.perf_counter()
        scores = compute_shapley(ds, config, n_jobs=n_jobs, max_features=64)
        times.append(time.perf_counter() - t0)
        evals = scores.n_value_evals
    return statistics.median(times), evals


def bench_features(
    sizes: Iterable[int],
    config: ApproxConfig,
    reps: int = 3,
    family: Callable[[int], CategoricalDataset] | None = None,
    n_jobs: int = 1,
) -> BenchReport:
    """Time an estimator on datasets with a growing number of features."""
    family = family or synthetic_family()
    report = BenchReport("features")
    for n in sizes:
        ds = family(n)
        seconds, evals = _time(ds, config, reps, n_jobs)
        report.rows.append(BenchRow(str(config), ds.n_features, ds.n_rows, seconds, evals))
    return report


def bench_rows(
    sizes: Iterable[int],
    config: ApproxConfig,
    reps: int = 3,
    n_features: int = 10,
    n_jobs: int = 1,
    seed: int = 0,
) -> BenchReport:
    """Time an estimator on datasets with a growing number of rows."""
    report = BenchReport("rows")
    for d in sizes:
        ds = synthetic_family(n_rows=d, seed=seed)(n_features)
        seconds, evals = _time(ds, config, reps, n_jobs)
        report.rows.append(BenchRow(str(config), ds.n_features, ds.n_rows, seconds, evals))
    return report
