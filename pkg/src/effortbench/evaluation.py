"""Leave-one-out evaluation with nested grid tuning, and the benchmark metrics.

RNG discipline: the stream for outer fold i of a (dataset, learner) pair is
base.child(dataset_id, seed_label, i).  Inside a fold, the tuner evaluates
grid candidate ci on inner fold f with fold_rng.child("tune", ci, f) and the
winning candidate is refit with fold_rng.child("fit").  Everything is a pure
function of the base stream, so folds can run in any order (or in parallel)
and produce identical records.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ingest import Dataset
from .learners import HyperGrid, LearnerSpec, fit
from .numerics import RngStream

INNER_LOOCV_BELOW = 10  # training sets smaller than this use inner LOOCV


class EvaluationError(RuntimeError):
    """A fold failed to fit or predict."""


class UndefinedMetricError(ValueError):
    """The metric is undefined for these records (e.g. a zero actual)."""


@dataclass(frozen=True)
class PredictionRecord:
    fold_index: int
    predicted: float
    actual: float
    chosen_params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MetricValue:
    name: str
    value: float
    n: int


@dataclass(frozen=True)
class FoldPlan:
    """LOOCV fold layout: row i is the single test row of fold i."""

    n_rows: int

    def folds(self):
        all_rows = np.arange(self.n_rows)
        for i in range(self.n_rows):
            yield np.delete(all_rows, i), i


def rmse(records) -> MetricValue:
    records = list(records)
    if not records:
        raise UndefinedMetricError("RMSE of zero records is undefined")
    sq = [(r.predicted - r.actual) ** 2 for r in records]
    return MetricValue("RMSE", float(np.sqrt(np.mean(sq))), len(records))


def mmre(records) -> MetricValue:
    records = list(records)
    if not records:
        raise UndefinedMetricError("MMRE of zero records is undefined")
    for r in records:
        if r.actual == 0:
            raise UndefinedMetricError(
                f"MMRE undefined: record at fold {r.fold_index} has actual value 0"
            )
    ratios = [abs(r.predicted - r.actual) / abs(r.actual) for r in records]
    return MetricValue("MMRE", float(np.mean(ratios)), len(records))


def fold_mean_abs_error(records) -> MetricValue:
    """Mean of the per-fold absolute errors.

    With single-row LOOCV folds this is the 'average the per-fold error'
    reading of the evaluation protocol; pooled RMSE is the other reading.
    Both are reported.
    """
    records = list(records)
    if not records:
        raise UndefinedMetricError("MAE of zero records is undefined")
    return MetricValue("MAE", float(np.mean([abs(r.predicted - r.actual)
                                             for r in records])), len(records))

METRIC_FUNCS = {"RMSE": rmse, "MMRE": mmre, "MAE": fold_mean_abs_error}


def tune(train_X, train_y, grid: HyperGrid, inner_folds: int,
         rng: RngStream) -> LearnerSpec:
    """Pick the grid candidate with the lowest inner-CV pooled RMSE.

    Inner folds are assigned round-robin by row index; training sets smaller
    than INNER_LOOCV_BELOW fall back to inner LOOCV.  Ties go to the earlier
    candidate in grid enumeration order.
    """
    candidates = grid.candidates()
    if len(candidates) == 1:
        return candidates[0]
    n = len(train_y)
    k = n if n < INNER_LOOCV_BELOW else min(inner_folds, n)
    assignment = np.arange(n) % k

    best_spec, best_err = None, None
    for ci, spec in enumerate(candidates):
        sq_sum = 0.0
        for f in range(k):
            val = assignment == f
            tr = ~val
            model = fit(spec, train_X[tr], train_y[tr], rng.child("tune", ci, f))
            preds = model.predict_many(train_X[val])
            sq_sum += float(np.sum((preds - train_y[val]) ** 2))
        err = np.sqrt(sq_sum / n)
        if best_err is None or err < best_err:
            best_spec, best_err = spec, err
    return best_spec


def loocv_run(dataset: Dataset, spec_or_grid, base_rng: RngStream,
              inner_folds: int = 5) -> list[PredictionRecord]:
    """One held-out prediction per dataset row, with per-fold nested tuning."""
    n = dataset.n_rows
    if n < 3:
        raise EvaluationError(f"LOOCV needs at least 3 rows, dataset has {n}")
    X = dataset.feature_matrix()
    y = dataset.target_vector()

    if isinstance(spec_or_grid, HyperGrid):
        grid = spec_or_grid
        needs_tuning = len(grid) > 1
        single = None if needs_tuning else grid.candidates()[0]
        seed_label = grid.seed_label or grid.kind
    else:
        grid = None
        needs_tuning = False
        single = spec_or_grid
        seed_label = spec_or_grid.seed_label

    records = []
    for train_idx, i in FoldPlan(n).folds():
        fold_rng = base_rng.child(dataset.id, seed_label, i)
        try:
            if needs_tuning:
                spec = tune(X[train_idx], y[train_idx], grid, inner_folds, fold_rng)
            else:
                spec = single
            model = fit(spec, X[train_idx], y[train_idx], fold_rng.child("fit"))
            pred = model.predict_row(X[i])
        except Exception as exc:
            raise EvaluationError(f"fold {i} of {dataset.id} failed: {exc}") from exc
        records.append(PredictionRecord(fold_index=i, predicted=float(pred),
                                        actual=float(y[i]),
                                        chosen_params=dict(spec.params)))
    return records


def check_fold_coverage(records, n_rows: int):
    """Assert the LOOCV contract: exactly one record per row, in fold order."""
    if len(records) != n_rows:
        raise EvaluationError(f"expected {n_rows} records, got {len(records)}")
    seen = [r.fold_index for r in records]
    if seen != list(range(n_rows)):
        raise EvaluationError(f"fold indices are not 0..{n_rows - 1}: {seen}")


@dataclass(frozen=True)
class BenchReport:
    """Metric matrix over (learner, dataset) plus per-learner average and rank."""

    learners: tuple[str, ...]
    datasets: tuple[str, ...]
    values: dict          # learner -> dataset -> float (the ranking metric)
    averages: dict        # learner -> float
    ranks: dict           # learner -> int (1 = best, competition ranking)


def competition_ranks(averages: dict) -> dict:
    return {k: 1 + sum(1 for other in averages.values() if other < avg)
            for k, avg in averages.items()}


def aggregate(per_cell: dict, learners=None, datasets=None) -> BenchReport:
    """Per-learner average over datasets and competition rank on the average.

    per_cell maps learner -> dataset -> value; every learner must cover every
    dataset.  Ties share the smaller rank and the next rank is skipped.
    """
    learners = tuple(learners if learners is not None else per_cell)
    if not learners:
        raise ValueError("no learners to aggregate")
    datasets = tuple(datasets if datasets is not None else per_cell[learners[0]])
    values = {}
    for kind in learners:
        row = per_cell.get(kind, {})
        missing = [ds for ds in datasets if ds not in row]
        if missing:
            raise ValueError(f"learner {kind} is missing datasets: {missing}")
        values[kind] = {ds: float(row[ds]) for ds in datasets}
    averages = {kind: float(np.mean([values[kind][ds] for ds in datasets]))
                for kind in learners}
    return BenchReport(learners=learners, datasets=datasets, values=values,
                       averages=averages, ranks=competition_ranks(averages))
