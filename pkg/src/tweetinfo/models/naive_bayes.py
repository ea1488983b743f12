"""Multinomial naive Bayes with Laplace smoothing."""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..features import FeatureMatrix
from .base import as_label_codes, check_dim, register_model


@register_model("nb")
class MultinomialNaiveBayes:
    needs_seed = False

    def __init__(self, alpha: float = 1.0):
        if alpha <= 0:
            raise DataError("alpha must be positive")
        self.alpha = float(alpha)
        self.class_log_prior: np.ndarray | None = None  # order: class 0, class 1
        self.feature_log_prob: np.ndarray | None = None  # shape (2, dim)

    def fit(self, X: FeatureMatrix, y) -> "MultinomialNaiveBayes":
        codes = as_label_codes(y, require_both_classes=True)
        if X.n_rows != len(codes):
            raise DataError(f"{X.n_rows} rows but {len(codes)} labels")
        mat = X.csr()
        if mat.nnz and mat.data.min() < 0:
            raise DataError("multinomial NB requires non-negative feature values")
        dim = X.dim
        counts = np.zeros((2, dim))
        priors = np.zeros(2)
        for cls in (0, 1):
            mask = codes == cls
            priors[cls] = mask.sum()
            counts[cls] = np.asarray(mat[mask].sum(axis=0)).ravel()
        smoothed = counts + self.alpha
        self.feature_log_prob = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        self.class_log_prior = np.log(priors) - np.log(priors.sum())
        return self

    def joint_log_likelihood(self, X: FeatureMatrix) -> np.ndarray:
        if self.feature_log_prob is None:
            raise DataError("model is not fitted")
        check_dim(self.feature_log_prob.shape[1], X)
        mat = X.csr()
        if mat.nnz and mat.data.min() < 0:
            raise DataError("multinomial NB requires non-negative feature values")
        return mat @ self.feature_log_prob.T + self.class_log_prior

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        # ties resolve to the positive class
        return (jll[:, 1] >= jll[:, 0]).astype(np.int8)

    def to_params(self) -> dict:
        if self.feature_log_prob is None:
            raise DataError("cannot serialize an unfitted model")
        return {
            "alpha": self.alpha,
            "class_log_prior": [float(x) for x in self.class_log_prior],
            "feature_log_prob": [[float(x) for x in row] for row in self.feature_log_prob],
        }

    @classmethod
    def from_params(cls, doc: dict) -> "MultinomialNaiveBayes":
        model = cls(alpha=doc["alpha"])
        model.class_log_prior = np.array(doc["class_log_prior"])
        model.feature_log_prob = np.array(doc["feature_log_prob"])
        return model
