"""Gaussian process regression with an isotropic squared-exponential kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import DefinitenessError, solve_spd

JITTER_BASE = 1e-10
MAX_JITTER_RETRIES = 3


def _sq_dists(A, B):
    aa = np.sum(A * A, axis=1)[:, None]
    bb = np.sum(B * B, axis=1)[None, :]
    d2 = aa + bb - 2.0 * (A @ B.T)
    return np.maximum(d2, 0.0)


@dataclass
class GpModel:
    train_X: np.ndarray
    alpha: np.ndarray        # (K + noise I)^-1 (y - mean)
    y_mean: float
    signal_var: float
    length_scale: float

    def predict_many(self, X):
        if self.signal_var <= 0:
            return np.full(len(X), self.y_mean)
        d2 = _sq_dists(X, self.train_X)
        k_star = self.signal_var * np.exp(-d2 / (2.0 * self.length_scale ** 2))
        return self.y_mean + k_star @ self.alpha


def fit_gp(X, y, length_scale, noise_var, signal_var=None) -> GpModel:
    """Zero-mean GP posterior on the centered target.

    The signal variance defaults to the sample variance of y.  The kernel
    matrix gets a jitter of 1e-10 * trace(K)/n on the diagonal, escalated
    tenfold up to 3 retries before giving up with a definiteness error.
    """
    if length_scale <= 0:
        raise ValueError("length_scale must be positive")
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    n = X.shape[0]
    y_mean = float(y.mean())
    if signal_var is None:
        signal_var = float(np.var(y, ddof=1)) if n > 1 else 0.0
    if signal_var <= 0:
        return GpModel(X.copy(), np.zeros(n), y_mean, 0.0, length_scale)

    K = signal_var * np.exp(-_sq_dists(X, X) / (2.0 * length_scale ** 2))
    yc = y - y_mean
    jitter = JITTER_BASE * np.trace(K) / n
    last_exc = None
    for attempt in range(MAX_JITTER_RETRIES + 1):
        try:
            alpha = solve_spd(K + (noise_var + jitter * 10.0 ** attempt) * np.eye(n), yc)
            return GpModel(X.copy(), alpha, y_mean, signal_var, length_scale)
        except DefinitenessError as exc:
            last_exc = exc
    raise DefinitenessError(
        f"kernel matrix stayed non-positive-definite after {MAX_JITTER_RETRIES} "
        f"jitter escalations"
    ) from last_exc
