"""The nine regression techniques behind one fit/predict contract.

Every learner is implemented in this package from first principles on top of
the numerics kernels.  `fit` dispatches on LearnerSpec.kind, standardizes
features for every kind except the trees (which are invariant to monotone
feature maps), and is deterministic given (spec, data, rng stream).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..numerics import DimensionError, RngStream, Scaler, apply_scaler, fit_scaler
from . import elm, gp, linear, mars, tree

KINDS = ("ELM", "LM", "CART", "RF", "PLS", "GP", "LRBS", "BGLM", "MARS")

# "MEAN" is a baseline hook used by the test suite, not one of the nine.
_ALL_KINDS = KINDS + ("MEAN",)

_PARAM_NAMES = {
    "ELM": ("hidden_width", "ridge"),
    "LM": (),
    "CART": ("min_leaf", "max_depth"),
    "RF": ("n_trees", "mtry", "min_leaf"),
    "PLS": ("n_components",),
    "GP": ("length_scale_factor", "noise_frac"),
    "LRBS": ("criterion_folds",),
    "BGLM": (),
    "MARS": ("max_terms", "gcv_penalty"),
    "MEAN": (),
}

_DEFAULTS = {
    "ELM": {"hidden_width": 20, "ridge": 1e-2},
    "CART": {"min_leaf": 2, "max_depth": None},
    "RF": {"n_trees": 100, "mtry": None, "min_leaf": 2},
    "PLS": {"n_components": 2},
    "GP": {"length_scale_factor": 1.0, "noise_frac": 1e-2},
    "LRBS": {"criterion_folds": 5},
    "MARS": {"max_terms": 21, "gcv_penalty": 3.0},
}

_STANDARDIZED = frozenset(k for k in _ALL_KINDS if k not in ("CART", "RF", "MEAN"))


class LearnerError(ValueError):
    """Invalid learner kind or hyperparameter assignment."""


@dataclass(frozen=True)
class LearnerSpec:
    """One learner kind plus a concrete hyperparameter assignment."""

    kind: str
    params: dict = field(default_factory=dict)
    seed_label: str = ""

    def __post_init__(self):
        if self.kind not in _ALL_KINDS:
            raise LearnerError(f"unknown learner kind {self.kind!r}; known: {KINDS}")
        allowed = _PARAM_NAMES[self.kind]
        for name in self.params:
            if name not in allowed:
                raise LearnerError(
                    f"{self.kind} has no parameter {name!r}; declared: {allowed}"
                )
        if not self.seed_label:
            object.__setattr__(self, "seed_label", self.kind)

    def resolved_params(self) -> dict:
        merged = dict(_DEFAULTS.get(self.kind, {}))
        merged.update(self.params)
        return merged


@dataclass(frozen=True)
class HyperGrid:
    """Finite per-parameter candidate lists, enumerated in declaration order."""

    kind: str
    params: dict = field(default_factory=dict)
    seed_label: str = ""

    def __post_init__(self):
        allowed = _PARAM_NAMES.get(self.kind)
        if allowed is None:
            raise LearnerError(f"unknown learner kind {self.kind!r}; known: {KINDS}")
        for name, values in self.params.items():
            if name not in allowed:
                raise LearnerError(
                    f"{self.kind} has no parameter {name!r}; declared: {allowed}"
                )
            if not list(values):
                raise LearnerError(f"empty candidate list for {self.kind}.{name}")

    def candidates(self) -> list[LearnerSpec]:
        if not self.params:
            return [LearnerSpec(self.kind, {}, self.seed_label)]
        names = list(self.params)
        combos = itertools.product(*(self.params[n] for n in names))
        return [
            LearnerSpec(self.kind, dict(zip(names, combo)), self.seed_label)
            for combo in combos
        ]

    def __len__(self) -> int:
        n = 1
        for values in self.params.values():
            n *= len(values)
        return n


def default_grid(kind: str, n_cols: int) -> HyperGrid:
    """The pinned default tuning grid for a learner on an n_cols-wide dataset."""
    if kind == "ELM":
        return HyperGrid(kind, {"hidden_width": [5, 10, 20, 40],
                                "ridge": [0.0, 1e-4, 1e-2, 1.0]})
    if kind == "PLS":
        return HyperGrid(kind, {"n_components": [1, 2, 3, 4]})
    if kind == "GP":
        return HyperGrid(kind, {"length_scale_factor": [0.5, 1.0, 2.0, 4.0],
                                "noise_frac": [1e-4, 1e-2, 1e-1]})
    if kind == "CART":
        return HyperGrid(kind, {"min_leaf": [2, 5, 10], "max_depth": [3, 6, None]})
    if kind == "RF":
        mtry = []
        for m in (math.ceil(n_cols / 3), math.ceil(math.sqrt(n_cols)), n_cols):
            m = max(1, min(m, n_cols))
            if m not in mtry:
                mtry.append(m)
        return HyperGrid(kind, {"n_trees": [100], "mtry": mtry, "min_leaf": [2, 5]})
    if kind == "MARS":
        return HyperGrid(kind, {"max_terms": [11, 21], "gcv_penalty": [3.0]})
    if kind == "LRBS":
        return HyperGrid(kind, {"criterion_folds": [5]})
    if kind in ("LM", "BGLM", "MEAN"):
        return HyperGrid(kind, {})
    raise LearnerError(f"unknown learner kind {kind!r}")


@dataclass(frozen=True)
class FittedModel:
    """Opaque trained predictor: kind, learned state, and the fit-time scaler."""

    kind: str
    impl: object
    n_features: int
    scaler: Scaler | None = None

    def predict_row(self, row) -> float:
        row = np.asarray(row, dtype=float)
        if row.ndim != 1 or row.shape[0] != self.n_features:
            raise DimensionError(
                f"model was fit on {self.n_features} features, got row of shape {row.shape}"
            )
        return float(self.predict_many(row.reshape(1, -1))[0])

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionError(
                f"model was fit on {self.n_features} features, got matrix {X.shape}"
            )
        if self.scaler is not None:
            X = apply_scaler(self.scaler, X)
        return np.asarray(self.impl.predict_many(X), dtype=float)


class _MeanModel:
    """Baseline used by tests: predicts the training-target mean everywhere."""

    def __init__(self, mean):
        self.mean = float(mean)

    def predict_many(self, X):
        return np.full(len(X), self.mean)


def fit(spec: LearnerSpec, X, y, rng: RngStream) -> FittedModel:
    """Train one learner; deterministic given (spec, X, y, rng)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionError(f"incompatible training shapes X {X.shape}, y {y.shape}")
    if X.shape[0] < 2:
        raise DimensionError("need at least 2 training rows")
    params = spec.resolved_params()

    scaler = None
    Xw = X
    if spec.kind in _STANDARDIZED:
        scaler = fit_scaler(X)
        Xw = apply_scaler(scaler, X)

    kind = spec.kind
    if kind == "LM":
        impl = linear.fit_lm(Xw, y)
    elif kind == "LRBS":
        impl = linear.fit_lrbs(Xw, y, criterion_folds=params["criterion_folds"])
    elif kind == "BGLM":
        impl = linear.fit_bglm(Xw, y)
    elif kind == "PLS":
        impl = linear.fit_pls(Xw, y, n_components=params["n_components"])
    elif kind == "ELM":
        impl = elm.fit_elm(Xw, y, hidden_width=params["hidden_width"],
                           ridge=params["ridge"], rng=rng.child(spec.seed_label, "elm"))
    elif kind == "GP":
        length_scale = params["length_scale_factor"] * math.sqrt(X.shape[1])
        noise_var = params["noise_frac"] * (float(np.var(y, ddof=1)) if len(y) > 1 else 0.0)
        impl = gp.fit_gp(Xw, y, length_scale=length_scale, noise_var=noise_var)
    elif kind == "CART":
        impl = tree.fit_cart(Xw, y, min_leaf=params["min_leaf"],
                             max_depth=params["max_depth"])
    elif kind == "RF":
        mtry = params["mtry"] if params["mtry"] else X.shape[1]
        impl = tree.fit_rf(Xw, y, n_trees=params["n_trees"], mtry=mtry,
                           min_leaf=params["min_leaf"],
                           rng=rng.child(spec.seed_label, "rf"))
    elif kind == "MARS":
        impl = mars.fit_mars(Xw, y, max_terms=params["max_terms"],
                             gcv_penalty=params["gcv_penalty"])
    elif kind == "MEAN":
        impl = _MeanModel(y.mean())
    else:  # pragma: no cover - kinds validated in LearnerSpec
        raise LearnerError(f"unknown learner kind {kind!r}")

    return FittedModel(kind=kind, impl=impl, n_features=X.shape[1], scaler=scaler)


def predict(model: FittedModel, row) -> float:
    return model.predict_row(row)
