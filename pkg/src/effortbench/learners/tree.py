"""CART regression trees and bagged random forests.

Trees work on raw (unstandardized) features: splits are invariant under
monotone feature maps, so scaling would change nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import RngStream
from ._tree_kernels import grow_forest, predict_forest


@dataclass
class TreeEnsembleModel:
    """One or more trees as stacked arrays; prediction is the tree mean."""

    feature: np.ndarray    # (T, max_nodes)
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_nodes: np.ndarray    # (T,)

    @property
    def n_trees(self) -> int:
        return self.feature.shape[0]

    def predict_many(self, X):
        X = np.ascontiguousarray(X, dtype=float)
        return predict_forest(self.feature, self.threshold, self.left,
                              self.right, self.value, X)

    def leaf_values(self, tree: int = 0):
        k = self.n_nodes[tree]
        mask = self.feature[tree, :k] < 0
        return self.value[tree, :k][mask]


def _grow(X, y, boots, min_leaf, max_depth, subsets) -> TreeEnsembleModel:
    depth = -1 if max_depth is None else int(max_depth)
    arrays = grow_forest(np.ascontiguousarray(X, dtype=float),
                         np.ascontiguousarray(y, dtype=float),
                         boots, int(min_leaf), depth, subsets)
    return TreeEnsembleModel(*arrays)


def _all_features_subsets(n_trees, max_nodes, d):
    base = np.broadcast_to(np.arange(d, dtype=np.int64), (n_trees, max_nodes, d))
    return np.ascontiguousarray(base)


def fit_cart(X, y, min_leaf=1, max_depth=None) -> TreeEnsembleModel:
    """Exhaustive-search SSE-reduction tree; leaves predict their row mean."""
    if min_leaf < 1:
        raise ValueError("min_leaf must be at least 1")
    n, d = X.shape
    boots = np.arange(n, dtype=np.int64).reshape(1, n)
    return _grow(X, y, boots, min_leaf, max_depth,
                 _all_features_subsets(1, 2 * n + 1, d))


def fit_rf(X, y, n_trees, mtry, min_leaf, rng: RngStream,
           bootstrap=True) -> TreeEnsembleModel:
    """Bagged CART ensemble.

    Draw order from the forest stream: all bootstrap rows first (n_trees x n,
    with replacement), then the per-node candidate-feature scores.  Feature
    subsets are size mtry without replacement, sorted ascending so the
    tie-break matches a plain CART when mtry equals the column count.
    bootstrap=False is a test hook that trains every tree on the raw rows.
    """
    n, d = X.shape
    if n_trees < 1:
        raise ValueError("need at least one tree")
    if not 1 <= mtry <= d:
        raise ValueError(f"mtry must be in [1, {d}], got {mtry}")
    max_nodes = 2 * n + 1
    gen = rng.child("forest").generator()
    if bootstrap:
        boots = gen.integers(0, n, size=(n_trees, n)).astype(np.int64)
    else:
        boots = np.ascontiguousarray(
            np.broadcast_to(np.arange(n, dtype=np.int64), (n_trees, n)))
    if mtry == d:
        subsets = _all_features_subsets(n_trees, max_nodes, d)
    else:
        scores = gen.random((n_trees, max_nodes, d))
        subsets = np.sort(np.argsort(scores, axis=2)[:, :, :mtry], axis=2)
        subsets = np.ascontiguousarray(subsets.astype(np.int64))
    return _grow(X, y, boots, min_leaf, None, subsets)
