"""Extreme learning machine: random fixed hidden layer, trained output weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import RngStream, least_squares, solve_spd


@dataclass
class ElmModel:
    weights: np.ndarray      # d x h hidden weights
    biases: np.ndarray       # h
    out_coefs: np.ndarray    # h output weights
    intercept: float
    h_offset: np.ndarray     # training means of the hidden activations

    def _hidden(self, X):
        return 1.0 / (1.0 + np.exp(-(X @ self.weights + self.biases)))

    def predict_many(self, X):
        if self.weights.shape[1] == 0:
            return np.full(len(X), self.intercept)
        return self.intercept + (self._hidden(X) - self.h_offset) @ self.out_coefs


def fit_elm(X, y, hidden_width, ridge, rng: RngStream) -> ElmModel:
    """Hidden weights and biases are uniform[-1, 1] draws from the stream
    (weights first, then biases); the output layer is ridge-penalized least
    squares with an unpenalized intercept.  hidden_width 0 degenerates to the
    training mean, ridge 0 to the minimum-norm interpolator.
    """
    if hidden_width < 0:
        raise ValueError("hidden_width must be nonnegative")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    n, d = X.shape
    gen = rng.generator()
    W = gen.uniform(-1.0, 1.0, size=(d, hidden_width))
    b = gen.uniform(-1.0, 1.0, size=hidden_width)

    y_mean = float(y.mean())
    if hidden_width == 0:
        return ElmModel(W, b, np.zeros(0), y_mean, np.zeros(0))

    H = 1.0 / (1.0 + np.exp(-(X @ W + b)))
    h_mean = H.mean(axis=0)
    Hc = H - h_mean
    yc = y - y_mean
    if ridge == 0:
        coefs = least_squares(Hc, yc)
    else:
        coefs = solve_spd(Hc.T @ Hc + ridge * np.eye(hidden_width), Hc.T @ yc)
    return ElmModel(W, b, coefs, y_mean, h_mean)
