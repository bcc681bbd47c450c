"""
Linear estimators: least squares, ridge (SVD) and lasso (coordinate descent).
"""

from typing import Tuple

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator, RegressorMixin


def _center(X: np.ndarray, y: np.ndarray, fit_intercept: bool) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    if not fit_intercept:
        return X, y, np.zeros(X.shape[1]), 0.0
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    return X - x_mean, y - y_mean, x_mean, y_mean


class _LinearModel(BaseEstimator, RegressorMixin):
    coef_: np.ndarray
    intercept_: float
    n_iter_: int = 1
    converged_: bool = True

    def _set_intercept(self, x_mean: np.ndarray, y_mean: float) -> None:
        self.intercept_ = float(y_mean - x_mean @ self.coef_) if self.fit_intercept else 0.0

    def predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef_ + self.intercept_


class LinearRegression(_LinearModel):
    """Ordinary least squares via an SVD-based solver (minimum-norm when rank deficient)."""

    def __init__(self, fit_intercept: bool = True, copy_X: bool = True):
        self.fit_intercept = fit_intercept
        self.copy_X = copy_X

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "LinearRegression":
        X = np.array(X, dtype=float) if self.copy_X else np.asarray(X, dtype=float)
        Xc, yc, x_mean, y_mean = _center(X, y, self.fit_intercept)
        self.coef_, _, self.rank_, _ = linalg.lstsq(Xc, yc, lapack_driver="gelsd")
        self._set_intercept(x_mean, y_mean)
        return self


class RidgeRegression(_LinearModel):
    """
    L2-penalized least squares solved on the SVD of the centred design.

    coef = V diag(s / (s^2 + alpha)) U^T y. Singular values below the
    LAPACK cut-off are dropped, so alpha=0 gives the least-squares solution.
    """

    def __init__(self, alpha: float = 0.0, fit_intercept: bool = True, solver: str = "svd"):
        self.alpha = alpha
        self.fit_intercept = fit_intercept
        self.solver = solver

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "RidgeRegression":
        Xc, yc, x_mean, y_mean = _center(np.asarray(X, dtype=float), y, self.fit_intercept)
        U, s, Vt = linalg.svd(Xc, full_matrices=False)
        cutoff = np.finfo(float).eps * max(Xc.shape) * (s[0] if s.size else 0.0)
        keep = s > cutoff
        d = np.zeros_like(s)
        d[keep] = s[keep] / (s[keep] ** 2 + self.alpha)
        self.coef_ = Vt.T @ (d * (U.T @ yc))
        self._set_intercept(x_mean, y_mean)
        return self


class LassoRegression(_LinearModel):
    """
    Cyclic coordinate descent with soft-thresholding.

    Minimizes ||y - X b||^2 / (2m) + alpha * ||b||_1 on centred data. The
    objective after every full sweep is kept in ``objective_trace_``.
    """

    def __init__(self, alpha: float = 0.1, max_iter: int = 200, tol: float = 1e-4, fit_intercept: bool = True):
        self.alpha = alpha
        self.max_iter = max_iter
        self.tol = tol
        self.fit_intercept = fit_intercept

    def objective(self, X: np.ndarray, y: np.ndarray, coef: np.ndarray) -> float:
        residual = y - X @ coef
        return float(residual @ residual / (2.0 * len(y)) + self.alpha * np.abs(coef).sum())

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "LassoRegression":
        Xc, yc, x_mean, y_mean = _center(np.asarray(X, dtype=float), y, self.fit_intercept)
        m, d = Xc.shape
        col_sq = (Xc ** 2).sum(axis=0) / m
        coef = np.zeros(d)
        residual = yc.copy()
        trace = [self.objective(Xc, yc, coef)]

        self.converged_ = False
        sweeps = 0
        for sweeps in range(1, self.max_iter + 1):
            max_step = 0.0
            for j in range(d):
                if col_sq[j] == 0.0:
                    continue
                old = coef[j]
                rho = Xc[:, j] @ residual / m + col_sq[j] * old
                new = np.sign(rho) * max(abs(rho) - self.alpha, 0.0) / col_sq[j]
                if new != old:
                    residual -= Xc[:, j] * (new - old)
                    coef[j] = new
                    max_step = max(max_step, abs(new - old))
            trace.append(self.objective(Xc, yc, coef))
            if max_step <= self.tol * max(1.0, np.abs(coef).max(initial=0.0)):
                self.converged_ = True
                break

        self.coef_ = coef
        self.n_iter_ = sweeps
        self.objective_trace_ = np.asarray(trace)
        self._set_intercept(x_mean, y_mean)
        return self
