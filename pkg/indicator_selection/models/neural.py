"""
One-hidden-layer perceptron trained full-batch with L-BFGS.

Loss: 0.5 * mean((f(X) - y)^2) + alpha / (2m) * (||W1||^2 + ||W2||^2).
Weights are packed into one flat vector ``[W1, b1, W2, b2]``.
"""

from typing import Callable, Dict, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit
from sklearn.base import BaseEstimator, RegressorMixin


def _logistic(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a = expit(z)
    return a, a * (1.0 - a)


def _tanh(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a = np.tanh(z)
    return a, 1.0 - a * a


def _relu(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return np.maximum(z, 0.0), (z > 0).astype(float)


ACTIVATIONS: Dict[str, Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]] = {
    "logistic": _logistic,
    "tanh": _tanh,
    "relu": _relu,
}


class MLPRegressor(BaseEstimator, RegressorMixin):
    def __init__(
        self,
        hidden_layer_sizes: int = 50,
        activation: str = "logistic",
        alpha: float = 1.0,
        solver: str = "lbfgs",
        max_iter: int = 2000,
        tol: float = 1e-5,
        memory: int = 10,
        random_state: int = 0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.alpha = alpha
        self.solver = solver
        self.max_iter = max_iter
        self.tol = tol
        self.memory = memory
        self.random_state = random_state

    # -- parameter packing --------------------------------------------------

    def _shapes(self, d: int):
        h = int(self.hidden_layer_sizes)
        return (d, h), (h,), (h, 1), (1,)

    def _unpack(self, theta: np.ndarray, d: int):
        parts, start = [], 0
        for shape in self._shapes(d):
            size = int(np.prod(shape))
            parts.append(theta[start:start + size].reshape(shape))
            start += size
        return parts

    def initial_parameters(self, d: int) -> np.ndarray:
        """Uniform(-r, r) per layer with r = sqrt(6 / (fan_in + fan_out))."""
        rng = np.random.default_rng(self.random_state)
        h = int(self.hidden_layer_sizes)
        chunks = []
        for fan_in, fan_out in ((d, h), (h, 1)):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            chunks.append(rng.uniform(-bound, bound, fan_in * fan_out))
            chunks.append(rng.uniform(-bound, bound, fan_out))
        return np.concatenate(chunks)

    # -- objective ----------------------------------------------------------

    def loss_and_gradient(self, theta: np.ndarray, X: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
        """Penalized loss and its analytic gradient at ``theta``."""
        m, d = X.shape
        W1, b1, W2, b2 = self._unpack(theta, d)
        z = X @ W1 + b1
        a, da = ACTIVATIONS[self.activation](z)
        out = (a @ W2)[:, 0] + b2[0]
        diff = out - y

        penalty = self.alpha / (2.0 * m)
        loss = 0.5 * float(diff @ diff) / m + penalty * (float((W1 * W1).sum()) + float((W2 * W2).sum()))

        delta_out = diff / m
        gW2 = a.T @ delta_out[:, None] + 2.0 * penalty * W2
        gb2 = np.array([delta_out.sum()])
        delta_hidden = (delta_out[:, None] @ W2.T) * da
        gW1 = X.T @ delta_hidden + 2.0 * penalty * W1
        gb1 = delta_hidden.sum(axis=0)
        return loss, np.concatenate([gW1.ravel(), gb1, gW2.ravel(), gb2])

    def forward(self, theta: np.ndarray, X: np.ndarray) -> np.ndarray:
        W1, b1, W2, b2 = self._unpack(theta, X.shape[1])
        a, _ = ACTIVATIONS[self.activation](X @ W1 + b1)
        return (a @ W2)[:, 0] + b2[0]

    # -- training -----------------------------------------------------------

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight=None) -> "MLPRegressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        theta0 = self.initial_parameters(X.shape[1])

        last: Dict[str, object] = {}

        def objective(theta):
            loss, grad = self.loss_and_gradient(theta, X, y)
            last["theta"], last["loss"] = theta.copy(), loss
            return loss, grad

        history = [self.loss_and_gradient(theta0, X, y)[0]]

        def record(theta):
            if "theta" in last and np.array_equal(theta, last["theta"]):
                history.append(last["loss"])
            else:
                history.append(self.loss_and_gradient(theta, X, y)[0])

        result = minimize(
            objective,
            theta0,
            jac=True,
            method="L-BFGS-B",
            callback=record,
            options={
                "maxiter": self.max_iter,
                "maxfun": max(15000, 2 * self.max_iter),
                "maxcor": self.memory,
                "gtol": self.tol,
            },
        )
        self.coefs_ = result.x
        self.n_features_in_ = X.shape[1]
        self.n_iter_ = int(result.nit)
        self.converged_ = bool(result.status == 0)
        self.loss_ = float(result.fun)
        self.loss_curve_ = np.asarray(history)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.forward(self.coefs_, np.asarray(X, dtype=float))
