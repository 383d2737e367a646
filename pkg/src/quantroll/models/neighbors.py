"""k-nearest-neighbour models over standardized training rows."""
from __future__ import annotations

import numpy as np

from .base import Estimator, StandardizerMixin, check_fit_inputs, check_class_labels, classify_from_scores


class _KNNBase(Estimator, StandardizerMixin):
    def __init__(self, k: int = 5):
        self.k = k

    def _store(self, X: np.ndarray, y: np.ndarray) -> None:
        self.rows_ = self._fit_scaler(X)
        self.targets_ = y

    def _neighbor_targets(self, X) -> np.ndarray:
        """Targets of the k nearest stored rows per query, k capped at n.

        Distance ties resolve to the lower stored index (stable sort).
        """
        Xz = self.standardize(np.asarray(X, dtype=np.float64))
        k = min(self.k, self.rows_.shape[0])
        d2 = ((Xz[:, None, :] - self.rows_[None, :, :]) ** 2).sum(axis=2)
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        return self.targets_[order]


class KNNClassifier(_KNNBase):
    """Vote of the k nearest neighbours; the score is the up-share minus 0.5."""

    def fit(self, X, y) -> "KNNClassifier":
        X, y = check_fit_inputs(X, y)
        self._store(X, check_class_labels(y))
        return self

    def decision_function(self, X) -> np.ndarray:
        votes = self._neighbor_targets(X).astype(np.float64)
        return votes.mean(axis=1) / 2.0

    def predict(self, X) -> np.ndarray:
        return classify_from_scores(self.decision_function(X))


class KNNRegressor(_KNNBase):
    """Mean target of the k nearest neighbours."""

    def fit(self, X, y) -> "KNNRegressor":
        X, y = check_fit_inputs(X, y)
        self._store(X, y)
        return self

    def predict(self, X) -> np.ndarray:
        return self._neighbor_targets(X).mean(axis=1)
