"""Linear-family learners: OLS, backward selection, Bayesian ridge, PLS.

All four expect standardized features (the dispatch layer handles that) and
produce predictions affine in the input row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import least_squares, solve_spd


@dataclass
class AffineModel:
    """Prediction = intercept + X @ coefs on the (standardized) features."""

    intercept: float
    coefs: np.ndarray
    selected: tuple[int, ...] | None = None  # LRBS survivors, in feature order
    extra: dict = field(default_factory=dict)

    def predict_many(self, X):
        if self.selected is not None:
            X = X[:, list(self.selected)]
        return self.intercept + X @ self.coefs


def _ols(X, y):
    """Intercept plus slopes via minimum-norm least squares on [1 | X]."""
    design = np.column_stack([np.ones(len(y)), X])
    beta = least_squares(design, y)
    return float(beta[0]), beta[1:]


def fit_lm(X, y) -> AffineModel:
    intercept, coefs = _ols(X, y)
    return AffineModel(intercept=intercept, coefs=coefs)


def _cv_rmse_ols(X, y, cols, k):
    """Pooled k-fold CV RMSE of OLS restricted to the given columns.

    Folds are assigned round-robin by row index, so the criterion is
    deterministic.  An empty column set scores the intercept-only model.
    """
    n = len(y)
    k = min(k, n)
    assignments = np.arange(n) % k
    preds = np.empty(n)
    cols = list(cols)
    for f in range(k):
        val = assignments == f
        tr = ~val
        if cols:
            intercept, coefs = _ols(X[np.ix_(tr, cols)], y[tr])
            preds[val] = intercept + X[np.ix_(val, cols)] @ coefs
        else:
            preds[val] = y[tr].mean()
    return float(np.sqrt(np.mean((preds - y) ** 2)))


def fit_lrbs(X, y, criterion_folds=5) -> AffineModel:
    """Backward feature elimination scored by k-fold CV RMSE on the training rows.

    Starts from all features and keeps removing the single feature whose
    removal gives the lowest criterion, as long as that is no worse than the
    current one (ties favor removal, so a constant target strips every
    feature).  Ties between candidate features go to the lowest index.
    """
    if len(y) < 3:
        raise ValueError("backward selection needs at least 3 rows")
    current = list(range(X.shape[1]))
    score = _cv_rmse_ols(X, y, current, criterion_folds)
    while current:
        best_j, best_score = None, None
        for j in current:
            trial = [c for c in current if c != j]
            s = _cv_rmse_ols(X, y, trial, criterion_folds)
            if best_score is None or s < best_score:
                best_j, best_score = j, s
        if best_score <= score + 1e-12:
            current.remove(best_j)
            score = best_score
        else:
            break
    if current:
        intercept, coefs = _ols(X[:, current], y)
    else:
        intercept, coefs = float(y.mean()), np.zeros(0)
    return AffineModel(intercept=intercept, coefs=coefs, selected=tuple(current),
                       extra={"criterion": score})


def fit_bglm(X, y, alpha=None, beta=None, max_iter=300, tol=1e-8) -> AffineModel:
    """Bayesian linear regression with an isotropic Gaussian prior on the slopes.

    The prior precision alpha and noise precision beta are estimated by
    fixed-point evidence maximization unless passed explicitly.  The target is
    centered so the intercept stays unpenalized; the posterior-mean slopes are
    the ridge solution (X'X + (alpha/beta) I)^-1 X'y on the centered target.
    """
    n, d = X.shape
    y_mean = float(y.mean())
    yc = y - y_mean

    gram = X.T @ X
    xty = X.T @ yc
    eigvals = np.linalg.eigvalsh(gram)
    eigvals = np.clip(eigvals, 0.0, None)

    def posterior_mean(a, b):
        return solve_spd(gram + (a / b) * np.eye(d), xty)

    lo, hi = 1e-12, 1e12
    converged = True
    if alpha is None or beta is None:
        var_y = float(np.var(yc))
        a = 1.0 if alpha is None else float(alpha)
        b = (1.0 / var_y if var_y > 0 else 1.0) if beta is None else float(beta)
        converged = False
        for _ in range(max_iter):
            m = posterior_mean(a, b)
            gamma = float(np.sum(b * eigvals / (a + b * eigvals)))
            resid = yc - X @ m
            a_new = min(max(gamma / max(float(m @ m), 1e-300), lo), hi)
            b_new = min(max((n - gamma) / max(float(resid @ resid), 1e-300), lo), hi)
            if alpha is not None:
                a_new = a
            if beta is not None:
                b_new = b
            if abs(np.log(a_new / a)) + abs(np.log(b_new / b)) < tol:
                a, b = a_new, b_new
                converged = True
                break
            a, b = a_new, b_new
    else:
        a, b = float(alpha), float(beta)

    m = posterior_mean(a, b)
    return AffineModel(intercept=y_mean, coefs=m,
                       extra={"alpha": a, "beta": b, "converged": converged})


def fit_pls(X, y, n_components) -> AffineModel:
    """PLS1 regression: extract covariance-maximizing components, deflate, refit.

    The component count is clamped to min(rows - 1, cols); extraction also
    stops early once the residual target carries no covariance, so a constant
    target yields zero components and a mean prediction.
    """
    if n_components < 1:
        raise ValueError("need at least one component")
    n, d = X.shape
    cap = max(1, min(n - 1, d))
    n_comp = min(int(n_components), cap)

    y_mean = float(y.mean())
    E = X.copy()
    f = y - y_mean
    scale = float(np.sqrt(np.mean(X * X))) + 1.0

    W, P, C = [], [], []
    for _ in range(n_comp):
        w = E.T @ f
        norm_w = float(np.linalg.norm(w))
        if norm_w <= 1e-12 * scale * (abs(f).max() + 1e-300):
            break
        w = w / norm_w
        t = E @ w
        tt = float(t @ t)
        if tt <= 1e-300:
            break
        c = float(t @ f) / tt
        p = (E.T @ t) / tt
        E = E - np.outer(t, p)
        f = f - c * t
        W.append(w)
        P.append(p)
        C.append(c)

    if not W:
        coefs = np.zeros(d)
    else:
        Wm = np.column_stack(W)
        Pm = np.column_stack(P)
        cvec = np.array(C)
        # coefficients on the original features: W (P'W)^-1 c
        ptw = Pm.T @ Wm
        try:
            inner = np.linalg.solve(ptw, cvec)
        except np.linalg.LinAlgError:
            inner = least_squares(ptw, cvec)
        coefs = Wm @ inner

    return AffineModel(intercept=y_mean, coefs=coefs,
                       extra={"components_used": len(W),
                              "components_requested": int(n_components),
                              "clamped": int(n_components) > cap})
