"""effortbench: LOOCV benchmark of nine from-scratch regression learners
on eight classic software effort datasets, with nested hyperparameter tuning
and reports that mirror the published reference summary."""

from importlib import resources

from .evaluation import (aggregate, fold_mean_abs_error, loocv_run, mmre,
                         rmse, tune)
from .ingest import (DATASET_IDS, Dataset, compute_profile, load_arff,
                     load_csv, load_dataset, load_registry, select_schema,
                     validate_dataset, validate_profile)
from .learners import (KINDS, FittedModel, HyperGrid, LearnerSpec,
                       default_grid, fit, predict)
from .numerics import RngStream, split_rng

__version__ = "0.1.0"


def default_config_path():
    """Path of the shipped default benchmark config (all nine learners,
    all eight datasets, pinned seed)."""
    return str(resources.files("effortbench").joinpath("data/default_config.json"))
