"""Shared numerical kernels: least squares, SPD solves, feature scaling, seeded RNG.

Everything here is deterministic: the same inputs (and the same stream seed)
produce bit-identical outputs on every run.  Linear algebra is delegated to
numpy/LAPACK; the random stream is Philox, a counter-based generator whose
output does not depend on the platform.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Operand shapes do not line up."""


class DefinitenessError(ValueError):
    """A matrix required to be positive definite is not."""


def least_squares(A, b):
    """Minimum-norm least-squares solution of A x = b.

    Uses the SVD path (numpy lstsq with the default cutoff
    max(rows, cols) * eps * sigma_max), so rank-deficient systems return the
    minimum-norm minimizer.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"design matrix must be 2-d, got shape {A.shape}")
    if b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise DimensionError(
            f"incompatible shapes: A is {A.shape}, b has length {b.shape}"
        )
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return x


def solve_spd(A, b):
    """Solve A x = b for symmetric positive definite A via Cholesky."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise DimensionError(
            f"incompatible shapes: A is {A.shape}, b has length {b.shape}"
        )
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise DefinitenessError(f"matrix is not positive definite: {exc}") from exc
    y = np.linalg.solve(L, b)
    return np.linalg.solve(L.T, y)


# Kept as the name used throughout the learners; same routine.
cholesky_solve = solve_spd


def ridge_solve(X, y, lam):
    """Coefficients of the ridge problem min ||X b - y||^2 + lam ||b||^2.

    lam = 0 falls back to the minimum-norm least-squares path.
    """
    if lam < 0:
        raise ValueError("ridge penalty must be nonnegative")
    if lam == 0:
        return least_squares(X, y)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    d = X.shape[1]
    return solve_spd(X.T @ X + lam * np.eye(d), X.T @ y)


@dataclass(frozen=True)
class Scaler:
    """Per-feature affine standardizer fit on training rows only.

    scale is the sample (n-1) standard deviation, replaced by 1.0 for
    constant columns so scaling never divides by zero.
    """

    mean: np.ndarray
    scale: np.ndarray

    @property
    def n_features(self) -> int:
        return self.mean.shape[0]

    def transform(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.n_features:
            raise DimensionError(
                f"scaler was fit on {self.n_features} features, got {X.shape[-1]}"
            )
        return (X - self.mean) / self.scale


def fit_scaler(X) -> Scaler:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DimensionError("need a nonempty 2-d matrix to fit a scaler")
    mean = X.mean(axis=0)
    if X.shape[0] > 1:
        std = X.std(axis=0, ddof=1)
    else:
        std = np.zeros(X.shape[1])
    scale = np.where(std > 0, std, 1.0)
    return Scaler(mean=mean, scale=scale)


def apply_scaler(scaler: Scaler, X):
    return scaler.transform(X)


@dataclass(frozen=True)
class RngStream:
    """Immutable descriptor of a Philox random stream.

    Children are derived by hashing the parent seed together with a label
    path, so any labelled child can be constructed in any order and still
    yields the same stream.  `generator()` returns a fresh numpy Generator
    each call; consuming one never mutates the stream descriptor.
    """

    seed: int

    def child(self, *labels) -> "RngStream":
        h = hashlib.sha256()
        h.update(str(self.seed).encode())
        for label in labels:
            h.update(b"\x1f")
            h.update(str(label).encode())
        return RngStream(seed=int.from_bytes(h.digest()[:8], "little"))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed))


def split_rng(base: RngStream, labels) -> RngStream:
    """Deterministic child stream for a sequence of labels."""
    return base.child(*labels)
