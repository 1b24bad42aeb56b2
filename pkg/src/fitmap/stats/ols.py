"""Least squares with classical inference, solved by QR orthogonalization.

The design matrix is the predictors plus a leading intercept column. The
QR route avoids forming X'X for the solve; the (X'X)^-1 needed for the
standard errors comes from the R factor's inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import FitmapError
from .special import stars_for, t_two_sided_p

INTERCEPT = "intercept"


class RankDeficient(FitmapError):
    pass


class TooFewRows(FitmapError):
    pass


@dataclass(frozen=True)
class TermEstimate:
    label: str
    estimate: float
    std_error: float
    t_stat: float
    p_value: float
    stars: str


@dataclass(frozen=True)
class RegressionReport:
    terms: tuple[TermEstimate, ...]  # intercept first, then predictors in order
    r_squared: float
    adj_r_squared: float
    n_used: int
    dropped_rows: int
    vif: dict[str, float]
    fitted: tuple[float, ...]
    residuals: tuple[float, ...]
    row_ids: tuple[str, ...]

    def term(self, label: str) -> TermEstimate:
        for t in self.terms:
            if t.label == label:
                return t
        raise KeyError(label)


def _design(predictors: np.ndarray, labels: Sequence[str]) -> np.ndarray:
    predictors = np.asarray(predictors, dtype=float)
    if predictors.ndim != 2:
        raise ValueError("predictors must be a 2-d array")
    if predictors.shape[1] != len(labels):
        raise ValueError("one label per predictor column required")
    n = predictors.shape[0]
    return np.column_stack([np.ones(n), predictors])


def _back_solve(R: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve upper-triangular R x = b by plain back substitution."""
    p = R.shape[0]
    x = np.zeros(p)
    for i in range(p - 1, -1, -1):
        x[i] = (b[i] - R[i, i + 1 :] @ x[i + 1 :]) / R[i, i]
    return x


def _qr_solve(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (beta, R) or raise RankDeficient."""
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    tol = max(X.shape) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    if diag.size == 0 or diag.min() <= tol:
        raise RankDeficient("design matrix is rank deficient (collinear columns)")
    beta = _back_solve(R, Q.T @ y)
    return beta, R


def _r_squared(y: np.ndarray, residuals: np.ndarray) -> float:
    rss = float(residuals @ residuals)
    centered = y - y.mean()
    tss = float(centered @ centered)
    if tss <= 0.0:
        return 1.0 if rss <= 1e-12 else 0.0
    return max(0.0, min(1.0, 1.0 - rss / tss))


def ols_fit(
    predictors: np.ndarray,
    y: np.ndarray,
    labels: Sequence[str],
    dropped_rows: int = 0,
    row_ids: Sequence[str] | None = None,
) -> RegressionReport:
    """Fit y on an intercept plus the predictor columns.

    Needs strictly more rows than coefficients, full column rank, and no
    missing cells (callers drop incomplete rows first and pass the count).
    """
    X = _design(predictors, labels)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    k = p - 1
    if y.shape != (n,):
        raise ValueError("response length must match predictor rows")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("design matrix and response must be finite")
    df = n - k - 1
    if df < 1:
        raise TooFewRows(f"{n} rows cannot support {k} predictors plus intercept")

    beta, R = _qr_solve(X, y)
    fitted = X @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    s2 = rss / df
    eye = np.eye(p)
    R_inv = np.column_stack([_back_solve(R, eye[:, j]) for j in range(p)])
    xtx_inv_diag = (R_inv * R_inv).sum(axis=1)
    se = np.sqrt(s2 * xtx_inv_diag)

    terms = []
    all_labels = [INTERCEPT, *labels]
    for label, b, s in zip(all_labels, beta, se):
        if s > 0.0:
            t = float(b / s)
        else:  # exact fit: zero residual variance
            t = math.inf if abs(b) > 1e-12 else 0.0
        p_value = t_two_sided_p(t, df)
        terms.append(
            TermEstimate(
                label=label,
                estimate=float(b),
                std_error=float(s),
                t_stat=t,
                p_value=p_value,
                stars=stars_for(p_value),
            )
        )

    r2 = _r_squared(y, residuals)
    adj = 1.0 - (1.0 - r2) * (n - 1) / df
    vif_values = vif(np.asarray(predictors, dtype=float), labels) if k >= 1 else {}
    ids = tuple(row_ids) if row_ids is not None else tuple(str(i) for i in range(n))
    if len(ids) != n:
        raise ValueError("row_ids length must match rows")
    return RegressionReport(
        terms=tuple(terms),
        r_squared=r2,
        adj_r_squared=adj,
        n_used=n,
        dropped_rows=dropped_rows,
        vif=vif_values,
        fitted=tuple(float(v) for v in fitted),
        residuals=tuple(float(v) for v in residuals),
        row_ids=ids,
    )


def vif(predictors: np.ndarray, labels: Sequence[str]) -> dict[str, float]:
    """Variance inflation: VIF_j = 1/(1 - R^2 of predictor j on the rest)."""
    predictors = np.asarray(predictors, dtype=float)
    if predictors.ndim != 2 or predictors.shape[1] != len(labels):
        raise ValueError("predictors must be 2-d with one label per column")
    n, k = predictors.shape
    out: dict[str, float] = {}
    for j, label in enumerate(labels):
        target = predictors[:, j]
        rest = np.delete(predictors, j, axis=1)
        X = np.column_stack([np.ones(n), rest])
        beta, _ = _qr_solve(X, target)
        residuals = target - X @ beta
        centered = target - target.mean()
        tss = float(centered @ centered)
        if tss <= 0.0:
            raise RankDeficient(f"predictor {label!r} is constant")
        r2 = 1.0 - float(residuals @ residuals) / tss
        out[label] = math.inf if r2 >= 1.0 else max(1.0, 1.0 / (1.0 - r2))
    return out
