"""
Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved over 2m variables beta = [a; a*] with labels s = [+1; -1]:

    min 0.5 beta^T Q beta + p^T beta,  Q_ij = s_i s_j K(x_i, x_j),
    p = [eps - y; eps + y],  sum_i s_i beta_i = 0,  0 <= beta <= C.

Each iteration updates the maximal violating pair analytically
(first-order working-set selection) until the KKT gap drops below ``tol``.
"""

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, RegressorMixin


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(A, B, metric="sqeuclidean"))


class SVRRegressor(BaseEstimator, RegressorMixin):
    def __init__(
        self,
        C: float = 0.1,
        gamma: float = 0.1,
        epsilon: float = 0.1,
        kernel: str = "rbf",
        tol: float = 1e-3,
        max_iter: int = 1_000_000,
    ):
        self.C = C
        self.gamma = gamma
        self.epsilon = epsilon
        self.kernel = kernel
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "SVRRegressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        m = len(y)
        C = float(self.C)
        K = rbf_kernel(X, X, self.gamma)
        diag = np.concatenate([np.diag(K), np.diag(K)])

        s = np.concatenate([np.ones(m), -np.ones(m)])
        beta = np.zeros(2 * m)
        grad = np.concatenate([self.epsilon - y, self.epsilon + y])

        def q_row(i: int) -> np.ndarray:
            k = K[i % m]
            return s[i] * s * np.concatenate([k, k])

        self.converged_ = False
        iterations = 0
        while iterations < self.max_iter:
            minus_sg = -s * grad
            up = ((s > 0) & (beta < C)) | ((s < 0) & (beta > 0))
            low = ((s > 0) & (beta > 0)) | ((s < 0) & (beta < C))
            if not up.any() or not low.any():
                self.converged_ = True
                break
            i = int(np.flatnonzero(up)[np.argmax(minus_sg[up])])
            j = int(np.flatnonzero(low)[np.argmin(minus_sg[low])])
            if minus_sg[i] - minus_sg[j] < self.tol:
                self.converged_ = True
                break
            iterations += 1

            Qi, Qj = q_row(i), q_row(j)
            old_i, old_j = beta[i], beta[j]
            if s[i] != s[j]:
                quad = max(diag[i] + diag[j] + 2.0 * Qi[j], 1e-12)
                delta = (-grad[i] - grad[j]) / quad
                diff = old_i - old_j
                ai, aj = old_i + delta, old_j + delta
                if diff > 0:
                    if aj < 0:
                        aj, ai = 0.0, diff
                elif ai < 0:
                    ai, aj = 0.0, -diff
                if diff > 0:
                    if ai > C:
                        ai, aj = C, C - diff
                elif aj > C:
                    aj, ai = C, C + diff
            else:
                quad = max(diag[i] + diag[j] - 2.0 * Qi[j], 1e-12)
                delta = (grad[i] - grad[j]) / quad
                total = old_i + old_j
                ai, aj = old_i - delta, old_j + delta
                if total > C:
                    if ai > C:
                        ai, aj = C, total - C
                elif aj < 0:
                    aj, ai = 0.0, total
                if total > C:
                    if aj > C:
                        aj, ai = C, total - C
                elif ai < 0:
                    ai, aj = 0.0, total
            beta[i], beta[j] = ai, aj
            grad += Qi * (ai - old_i) + Qj * (aj - old_j)

        self.n_iter_ = iterations
        self.alpha_ = beta[:m].copy()
        self.alpha_star_ = beta[m:].copy()
        self.dual_coef_ = self.alpha_ - self.alpha_star_
        self.intercept_ = -self._rho(beta, grad, s, C)
        self.support_ = np.flatnonzero(self.dual_coef_ != 0.0)
        self.support_vectors_ = X[self.support_]
        self._support_coef = self.dual_coef_[self.support_]
        return self

    @staticmethod
    def _rho(beta: np.ndarray, grad: np.ndarray, s: np.ndarray, C: float) -> float:
        sg = s * grad
        at_upper = beta >= C
        at_lower = beta <= 0
        free = ~(at_upper | at_lower)
        if free.any():
            return float(sg[free].mean())
        ub_mask = (at_upper & (s < 0)) | (at_lower & (s > 0))
        lb_mask = (at_upper & (s > 0)) | (at_lower & (s < 0))
        ub = sg[ub_mask].min() if ub_mask.any() else np.inf
        lb = sg[lb_mask].max() if lb_mask.any() else -np.inf
        return float((ub + lb) / 2.0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.support_.size == 0:
            return np.full(X.shape[0], self.intercept_)
        return rbf_kernel(X, self.support_vectors_, self.gamma) @ self._support_coef + self.intercept_
