"""Benchmark orchestration and report emission.

A run is described by a JSON config (datasets, learners with optional grid
overrides, seed, inner fold count, metric set).  Execution produces one cell
per (learner, dataset): the full LOOCV prediction records plus pooled
metrics.  Reports are emitted three ways from the same payload: report.json
(machine, full doubles, provenance), report.md (human table: learners x
datasets + Avg + Rank) and chart.csv (learner, dataset, rmse rows for bar
charts).  Nothing time-dependent goes into the files, so identical runs are
byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import evaluation, ingest
from .learners import KINDS, HyperGrid, LearnerError, default_grid
from .numerics import RngStream

SUITE_VERSION = "0.1.0"


class ConfigError(ValueError):
    """The run configuration is malformed."""


@dataclass(frozen=True)
class LearnerConfig:
    kind: str
    grid_override: dict  # param -> list of candidate values; {} = defaults


@dataclass(frozen=True)
class RunConfig:
    datasets: tuple[str, ...]
    learners: tuple[LearnerConfig, ...]
    seed: int
    inner_folds: int = 5
    metrics: tuple[str, ...] = ("RMSE", "MMRE")
    output_dir: str = "bench-out"

    def canonical(self) -> dict:
        return {
            "datasets": list(self.datasets),
            "learners": [
                {"kind": lc.kind, **({"grid": lc.grid_override} if lc.grid_override else {})}
                for lc in self.learners
            ],
            "seed": self.seed,
            "inner_folds": self.inner_folds,
            "metrics": list(self.metrics),
            "output_dir": self.output_dir,
        }

    def hash(self) -> str:
        data = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(data).hexdigest()


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"datasets", "learners", "seed", "inner_folds", "metrics", "output_dir"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "seed" not in raw:
        raise ConfigError("config must pin a seed; there is no wall-clock default")
    seed = raw["seed"]
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")

    datasets = tuple(raw.get("datasets", []))
    if not datasets:
        raise ConfigError("config lists no datasets")
    registry = ingest.load_registry()
    for ds in datasets:
        if ds not in registry:
            raise ConfigError(
                f"unknown dataset id {ds!r}; registered: {', '.join(sorted(registry))}"
            )

    learners = []
    for item in raw.get("learners", []):
        if isinstance(item, str):
            item = {"kind": item}
        kind = item.get("kind")
        override = {p: list(v) for p, v in item.get("grid", {}).items()}
        if kind not in KINDS:
            raise ConfigError(f"unknown learner kind {kind!r}; known: {KINDS}")
        try:
            if override:
                HyperGrid(kind, override)
        except LearnerError as exc:
            raise ConfigError(str(exc)) from exc
        learners.append(LearnerConfig(kind=kind, grid_override=override))
    if not learners:
        raise ConfigError("config lists no learners")

    metrics = tuple(raw.get("metrics", ("RMSE", "MMRE")))
    for m in metrics:
        if m not in evaluation.METRIC_FUNCS:
            raise ConfigError(
                f"unknown metric {m!r}; known: {sorted(evaluation.METRIC_FUNCS)}"
            )
    inner_folds = int(raw.get("inner_folds", 5))
    if inner_folds < 2:
        raise ConfigError("inner_folds must be at least 2")
    return RunConfig(datasets=datasets, learners=tuple(learners), seed=seed,
                     inner_folds=inner_folds, metrics=metrics,
                     output_dir=str(raw.get("output_dir", "bench-out")))


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw)


def resolve_grid(lc: LearnerConfig, n_cols: int) -> HyperGrid:
    grid = default_grid(lc.kind, n_cols)
    if lc.grid_override:
        params = dict(grid.params)
        params.update(lc.grid_override)
        grid = HyperGrid(lc.kind, params)
    return grid


def _run_cell(args):
    """One (learner, dataset) benchmark cell; module-level so workers can pickle it."""
    kind, grid_override, dataset_id, seed, inner_folds, metric_names = args
    dataset = ingest.load_dataset(dataset_id)
    grid = resolve_grid(LearnerConfig(kind, grid_override), len(dataset.features))
    records = evaluation.loocv_run(dataset, grid, RngStream(seed), inner_folds)
    evaluation.check_fold_coverage(records, dataset.n_rows)
    cell = {}
    for name in dict.fromkeys((*metric_names, "RMSE", "MAE")):
        cell[name.lower()] = evaluation.METRIC_FUNCS[name](records).value
    cell["records"] = [
        {"fold": r.fold_index, "predicted": r.predicted, "actual": r.actual,
         "params": r.chosen_params}
        for r in records
    ]
    return cell


def run_benchmark(config: RunConfig, jobs: int = 1):
    """Execute every (learner, dataset) cell; returns (payload, failures)."""
    registry = ingest.load_registry()
    datasets_meta = {}
    n_cols = {}
    for ds in config.datasets:
        d = ingest.load_dataset(ds, registry)
        n_cols[ds] = len(d.features)
        datasets_meta[ds] = {
            "checksum": registry[ds].sha256,
            "rows": d.n_rows,
            "features": list(d.feature_names),
        }

    tasks = [(lc.kind, lc.grid_override, ds, config.seed, config.inner_folds,
              tuple(config.metrics))
             for lc in config.learners for ds in config.datasets]

    results = [None] * len(tasks)
    failures = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_cell, t) for t in tasks]
            for i, fut in enumerate(futures):
                try:
                    results[i] = fut.result()
                except Exception as exc:
                    failures.append({"learner": tasks[i][0], "dataset": tasks[i][2],
                                     "error": str(exc)})
    else:
        for i, t in enumerate(tasks):
            try:
                results[i] = _run_cell(t)
            except Exception as exc:
                failures.append({"learner": t[0], "dataset": t[2], "error": str(exc)})

    cells = {}
    for (kind, _, ds, *_rest), cell in zip(tasks, results):
        if cell is not None:
            cells.setdefault(kind, {})[ds] = cell

    learner_order = [lc.kind for lc in config.learners]
    payload = {
        "suite": "effortbench",
        "version": SUITE_VERSION,
        "config": config.canonical(),
        "config_hash": config.hash(),
        "seed": config.seed,
        "inner_folds": config.inner_folds,
        "metrics": list(config.metrics),
        "datasets": datasets_meta,
        "learners": learner_order,
        "grids": {
            lc.kind: {ds: {p: list(v) for p, v in resolve_grid(lc, n_cols[ds]).params.items()}
                      for ds in config.datasets}
            for lc in config.learners
        },
        "cells": cells,
        "failures": failures,
    }
    if not failures:
        bench = evaluation.aggregate(
            {k: {ds: cells[k][ds]["rmse"] for ds in config.datasets}
             for k in learner_order},
            learners=learner_order, datasets=config.datasets)
        payload["aggregate"] = {
            "metric": "RMSE",
            "averages": bench.averages,
            "ranks": bench.ranks,
        }
    return payload, failures


def fmt4(x: float) -> str:
    """Four decimal places with trailing zeros trimmed (table print style)."""
    text = f"{float(x):.4f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-") else "0"


def render_markdown(payload: dict) -> str:
    datasets = list(payload["config"]["datasets"])
    lines = ["# Benchmark report", ""]
    lines.append(f"Seed {payload['seed']}, inner folds {payload['inner_folds']},"
                 f" config hash `{payload['config_hash'][:16]}`.")
    lines.append("")
    header = ["Learner"] + datasets + ["Avg", "Rank"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    agg = payload.get("aggregate", {})
    for kind in payload["learners"]:
        row = [kind]
        for ds in datasets:
            cell = payload["cells"].get(kind, {}).get(ds)
            row.append(fmt4(cell["rmse"]) if cell else "failed")
        if agg:
            row.append(fmt4(agg["averages"][kind]))
            row.append(str(agg["ranks"][kind]))
        else:
            row.extend(["-", "-"])
        lines.append("| " + " | ".join(row) + " |")
    if payload["failures"]:
        lines.append("")
        lines.append("## Failures")
        for f in payload["failures"]:
            lines.append(f"- {f['learner']} on {f['dataset']}: {f['error']}")
    return "\n".join(lines) + "\n"


def render_chart_csv(payload: dict) -> str:
    lines = ["learner,dataset,rmse"]
    for kind in payload["learners"]:
        for ds in payload["config"]["datasets"]:
            cell = payload["cells"].get(kind, {}).get(ds)
            if cell:
                lines.append(f"{kind},{ds},{fmt4(cell['rmse'])}")
    return "\n".join(lines) + "\n"


def write_report_files(payload: dict, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out / "report.json",
        "md": out / "report.md",
        "csv": out / "chart.csv",
    }
    paths["json"].write_text(json.dumps(payload, indent=1) + "\n")
    paths["md"].write_text(render_markdown(payload))
    paths["csv"].write_text(render_chart_csv(payload))
    return paths
