"""Additive (degree-1) multivariate adaptive regression splines.

Forward pass: greedily add mirrored hinge pairs max(0, x - t) / max(0, t - x)
with knots at observed training values, choosing the pair that most reduces
training SSE.  A pair is scored through the identity
span{1, (x-t)+, (t-x)+} = span{1, x, (x-t)+}, so one projection of the linear
term plus per-knot orthogonal components prices every knot of a feature at
once; the stored basis is the literal hinge pair.  Projections onto the
current basis are accumulated incrementally as the basis grows.  Backward
pass: delete terms one at a time, keeping the subset with the lowest GCV.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import least_squares

_EPS = 1e-12


def gcv_cost(m_terms: int, penalty: float) -> float:
    """Effective parameter count C(m) = m + penalty * (m - 1) / 2."""
    return m_terms + penalty * (m_terms - 1) / 2.0


def gcv(sse: float, n: int, m_terms: int, penalty: float):
    """GCV score, or None when the model uses up n or more effective params."""
    denom = 1.0 - gcv_cost(m_terms, penalty) / n
    if denom <= 0:
        return None
    return (sse / n) / (denom * denom)


@dataclass
class MarsModel:
    terms: tuple            # (feature, knot, sign) per hinge; sign +1: (x-t)+, -1: (t-x)+
    coefs: np.ndarray       # intercept first, then one weight per term
    gcv: float | None
    forward_gcv: float | None
    fallback: bool = False  # True when no subset had a valid GCV

    def basis(self, X):
        cols = [np.ones(X.shape[0])]
        for f, t, s in self.terms:
            cols.append(np.maximum(0.0, s * (X[:, f] - t)))
        return np.column_stack(cols)

    def predict_many(self, X):
        return self.basis(X) @ self.coefs


def _orthonormal_append(Q, col):
    """Component of col orthogonal to Q's columns, normalized; None if dependent."""
    scale = float(np.linalg.norm(col))
    if scale <= 0:
        return None
    v = col - Q @ (Q.T @ col)
    v = v - Q @ (Q.T @ v)  # second pass for numerical hygiene
    norm = float(np.linalg.norm(v))
    if norm <= 1e-10 * scale:
        return None
    return v / norm


def fit_mars(X, y, max_terms=21, gcv_penalty=3.0) -> MarsModel:
    if max_terms < 1:
        raise ValueError("max_terms must be at least 1")
    n, d = X.shape
    y = np.asarray(y, dtype=float)

    knots = [np.unique(X[:, f]) for f in range(d)]
    slices = []
    start = 0
    for f in range(d):
        slices.append(slice(start, start + len(knots[f])))
        start += len(knots[f])
    all_knots = np.concatenate(knots) if start else np.zeros(0)
    feat_of = np.concatenate([np.full(len(knots[f]), f) for f in range(d)]) \
        if start else np.zeros(0, int)
    # hinge bank: every candidate column max(0, x_f - t), knots ascending per feature
    H = np.maximum(0.0, X[:, feat_of] - all_knots[None, :])
    col_sq = np.einsum("ij,ij->j", H, H)
    qproj_sq = np.zeros(H.shape[1])  # running sum of (q' h)^2 over basis columns q

    Q = np.full((n, 1), 1.0 / np.sqrt(n))
    qproj_sq += (Q[:, 0] @ H) ** 2
    terms: list[tuple[int, float, int]] = []
    m = 1
    r = y - Q @ (Q.T @ y)
    sse0 = float(r @ r)

    while m + 2 <= max_terms and m < n:
        sse = float(r @ r)
        if sse <= _EPS * max(sse0, 1.0):
            break
        r_dot_h = r @ H
        resid_sq = np.maximum(col_sq - qproj_sq, 0.0)

        best_gain, best_f, best_knot = 0.0, -1, 0.0
        for f in range(d):
            xf = X[:, f]
            x_perp = xf - Q @ (Q.T @ xf)
            nx = float(np.linalg.norm(x_perp))
            sl = slices[f]
            if nx > 1e-10 * (float(np.linalg.norm(xf)) + 1.0):
                qx = x_perp / nx
                gain_x = float(qx @ r) ** 2
                qx_dot_h = qx @ H[:, sl]
                s = np.maximum(resid_sq[sl] - qx_dot_h ** 2, 0.0)
                num = r_dot_h[sl] - float(qx @ r) * qx_dot_h
            else:
                gain_x = 0.0
                s = resid_sq[sl]
                num = r_dot_h[sl]
            with np.errstate(divide="ignore", invalid="ignore"):
                gains = gain_x + np.where(s > _EPS * np.maximum(col_sq[sl], 1.0),
                                          num * num / s, 0.0)
            j = int(np.argmax(gains))
            if gains[j] > best_gain:
                best_gain = float(gains[j])
                best_f = f
                best_knot = float(knots[f][j])

        if best_f < 0 or best_gain <= 1e-12 * max(sse0, 1.0):
            break
        appended = 0
        for sign in (1, -1):
            col = np.maximum(0.0, sign * (X[:, best_f] - best_knot))
            q = _orthonormal_append(Q, col)
            if q is not None:
                Q = np.column_stack([Q, q])
                qproj_sq += (q @ H) ** 2
                terms.append((best_f, best_knot, sign))
                appended += 1
        if appended == 0:
            break
        m += appended
        r = y - Q @ (Q.T @ y)

    forward_sse = float(r @ r)
    forward_gcv = gcv(forward_sse, n, m, gcv_penalty)

    # Backward pruning on the exact basis via its Gram matrix.
    full = MarsModel(tuple(terms), np.zeros(0), None, forward_gcv)
    B = full.basis(X)
    gram = B.T @ B
    bty = B.T @ y
    yty = float(y @ y)

    def subset_sse(col_ids):
        sub = np.ix_(col_ids, col_ids)
        try:
            beta = np.linalg.solve(gram[sub], bty[col_ids])
        except np.linalg.LinAlgError:
            beta = least_squares(B[:, col_ids], y)
        return max(0.0, yty - float(bty[col_ids] @ beta))

    current = list(range(1, len(terms) + 1))  # column 0 is the intercept
    best_cols, best_gcv = None, None
    score = gcv(subset_sse([0] + current), n, 1 + len(current), gcv_penalty)
    if score is not None:
        best_cols, best_gcv = [0] + current, score
    while current:
        round_cols, round_gcv = None, None
        for drop in current:
            cols = [0] + [c for c in current if c != drop]
            score = gcv(subset_sse(cols), n, len(cols), gcv_penalty)
            if score is not None and (round_gcv is None or score < round_gcv):
                round_cols, round_gcv = cols, score
        if round_cols is None:
            break
        current = round_cols[1:]
        if best_gcv is None or round_gcv < best_gcv:
            best_cols, best_gcv = round_cols, round_gcv

    if best_cols is None:
        return MarsModel((), np.array([float(y.mean())]), None, forward_gcv,
                         fallback=True)

    kept_terms = tuple(terms[c - 1] for c in best_cols[1:])
    coefs = least_squares(B[:, best_cols], y)
    return MarsModel(kept_terms, coefs, best_gcv, forward_gcv)
