"""Linear models: normal-equation OLS/ridge, gradient-descent losses, perceptron."""
from __future__ import annotations

import numpy as np

from ..direction import DOWN, UP
from .base import Estimator, StandardizerMixin, check_fit_inputs, check_class_labels, classify_from_scores


def _augment(X: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(X.shape[0]), X])


def _solve_normal_equations(X_aug: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    # lstsq keeps the solve total when X'X is singular (constant features are
    # routine inside tiny rolling windows); with lam > 0 the system is definite.
    gram = X_aug.T @ X_aug + lam * np.eye(X_aug.shape[1])
    weights, *_ = np.linalg.lstsq(gram, X_aug.T @ y, rcond=None)
    return weights


class OLSRegressor(Estimator):
    """Ordinary least squares on an intercept-augmented design."""

    def __init__(self):
        pass

    def fit(self, X, y) -> "OLSRegressor":
        X, y = check_fit_inputs(X, y)
        self.weights_ = _solve_normal_equations(_augment(X), y, 0.0)
        return self

    def predict(self, X) -> np.ndarray:
        return _augment(np.asarray(X, dtype=np.float64)) @ self.weights_


class RidgeRegressor(Estimator):
    def __init__(self, lam: float = 1.0):
        self.lam = lam

    def fit(self, X, y) -> "RidgeRegressor":
        X, y = check_fit_inputs(X, y)
        self.weights_ = _solve_normal_equations(_augment(X), y, self.lam)
        return self

    def predict(self, X) -> np.ndarray:
        return _augment(np.asarray(X, dtype=np.float64)) @ self.weights_


class RidgeClassifier(Estimator):
    """Ridge regression on +1/-1 targets; the fitted value is the margin."""

    def __init__(self, lam: float = 1.0):
        self.lam = lam

    def fit(self, X, y) -> "RidgeClassifier":
        X, y = check_fit_inputs(X, y)
        check_class_labels(y)
        self.weights_ = _solve_normal_equations(_augment(X), y, self.lam)
        return self

    def decision_function(self, X) -> np.ndarray:
        return _augment(np.asarray(X, dtype=np.float64)) @ self.weights_

    def predict(self, X) -> np.ndarray:
        return classify_from_scores(self.decision_function(X))


class _GradientDescent(Estimator, StandardizerMixin):
    """Mini-batch gradient descent over standardized features.

    Subclasses define the per-margin loss and its derivative. loss_history_
    records the full-training-set loss after each epoch.
    """

    def __init__(self, learning_rate: float = 0.01, epochs: int = 100, batch_size: int = 32, seed: int = 0):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed

    def _loss(self, margins: np.ndarray, y: np.ndarray) -> float:
        raise NotImplementedError

    def _dloss_dmargin(self, margins: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_targets(self, y: np.ndarray) -> np.ndarray:
        return y

    def fit(self, X, y) -> "_GradientDescent":
        X, y = check_fit_inputs(X, y)
        self._check_targets(y)
        Xz = _augment(self._fit_scaler(X))
        n, width = Xz.shape
        w = np.zeros(width)
        rng = np.random.default_rng(np.random.PCG64(self.seed))
        batch = min(self.batch_size, n)
        history = []
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                rows = order[start : start + batch]
                margins = Xz[rows] @ w
                grad = Xz[rows].T @ self._dloss_dmargin(margins, y[rows]) / rows.size
                w = w - self.learning_rate * grad
            history.append(self._loss(Xz @ w, y))
        self.weights_ = w
        self.loss_history_ = np.array(history)
        return self

    def _margins(self, X) -> np.ndarray:
        return _augment(self.standardize(np.asarray(X, dtype=np.float64))) @ self.weights_


class LogisticClassifier(_GradientDescent):
    """Binary logistic regression; decision score is probability(up) - 0.5."""

    def __init__(self, learning_rate: float = 0.1, epochs: int = 100, batch_size: int = 32, seed: int = 0):
        super().__init__(learning_rate, epochs, batch_size, seed)

    def _check_targets(self, y):
        return check_class_labels(y)

    def _loss(self, margins, y):
        return float(np.logaddexp(0.0, -y * margins).mean())

    def _dloss_dmargin(self, margins, y):
        # d/dm log(1 + exp(-y m)) = -y * sigmoid(-y m); tanh form avoids overflow
        return -y * 0.5 * (1.0 - np.tanh(0.5 * y * margins))

    def predict_proba_up(self, X) -> np.ndarray:
        return 0.5 * (1.0 + np.tanh(0.5 * self._margins(X)))

    def decision_function(self, X) -> np.ndarray:
        return self.predict_proba_up(X) - 0.5

    def predict(self, X) -> np.ndarray:
        return classify_from_scores(self.decision_function(X))


class SGDClassifier(_GradientDescent):
    """Hinge-loss linear classifier trained with mini-batch gradient descent."""

    def _check_targets(self, y):
        return check_class_labels(y)

    def _loss(self, margins, y):
        return float(np.maximum(0.0, 1.0 - y * margins).mean())

    def _dloss_dmargin(self, margins, y):
        return np.where(y * margins < 1.0, -y, 0.0)

    def decision_function(self, X) -> np.ndarray:
        return self._margins(X)

    def predict(self, X) -> np.ndarray:
        return classify_from_scores(self.decision_function(X))


class SGDRegressor(_GradientDescent):
    """Squared-loss linear regressor trained with mini-batch gradient descent."""

    def _loss(self, margins, y):
        return float(0.5 * np.mean((margins - y) ** 2))

    def _dloss_dmargin(self, margins, y):
        return margins - y

    def predict(self, X) -> np.ndarray:
        return self._margins(X)


class PerceptronClassifier(Estimator):
    """Rosenblatt's mistake-driven updates, swept in row order each epoch."""

    def __init__(self, learning_rate: float = 1.0, epochs: int = 100):
        self.learning_rate = learning_rate
        self.epochs = epochs

    def fit(self, X, y) -> "PerceptronClassifier":
        X, y = check_fit_inputs(X, y)
        check_class_labels(y)
        Xa = _augment(X)
        w = np.zeros(Xa.shape[1])
        for _ in range(self.epochs):
            mistakes = 0
            for i in range(Xa.shape[0]):
                if y[i] * (Xa[i] @ w) <= 0:
                    w = w + self.learning_rate * y[i] * Xa[i]
                    mistakes += 1
            if mistakes == 0:
                break
        self.weights_ = w
        return self

    def decision_function(self, X) -> np.ndarray:
        return _augment(np.asarray(X, dtype=np.float64)) @ self.weights_

    def predict(self, X) -> np.ndarray:
        return classify_from_scores(self.decision_function(X))


class ConstantClassifier(Estimator):
    """Degenerate-window fallback: always predicts one class at score +/-0.5."""

    def __init__(self, label: int = DOWN):
        self.label = label

    def fit(self, X, y) -> "ConstantClassifier":
        return self

    def decision_function(self, X) -> np.ndarray:
        n = np.asarray(X).shape[0]
        return np.full(n, 0.5 if self.label == UP else -0.5)

    def predict(self, X) -> np.ndarray:
        n = np.asarray(X).shape[0]
        return np.full(n, self.label, dtype=np.int8)


class ConstantRegressor(Estimator):
    """Degenerate-window fallback: always predicts the training-mean target."""

    def __init__(self, value: float = 0.0):
        self.value = value

    def fit(self, X, y) -> "ConstantRegressor":
        return self

    def predict(self, X) -> np.ndarray:
        return np.full(np.asarray(X).shape[0], self.value)
