"""Stratified dummy baseline: i.i.d. label draws from the training distribution.

Expected F1 equals the positive-class prevalence, which is what makes it a
useful floor for the real classifiers.  Each predict call re-seeds its own
PCG64 generator, so a given (model, input) pair always produces the same
predictions.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..features import FeatureMatrix
from .base import as_label_codes, register_model


@register_model("dummy")
class StratifiedDummy:
    needs_seed = True

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.positive_rate: float | None = None

    def fit(self, X: FeatureMatrix, y) -> "StratifiedDummy":
        codes = as_label_codes(y)
        if len(codes) == 0:
            raise DataError("cannot fit on an empty dataset")
        self.positive_rate = float(np.mean(codes == 1))
        return self

    def fit_labels(self, y) -> "StratifiedDummy":
        """Fit from labels alone (features are irrelevant to this baseline)."""
        return self.fit(FeatureMatrix(np.zeros((len(y), 1))), y)

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        if self.positive_rate is None:
            raise DataError("model is not fitted")
        rng = np.random.Generator(np.random.PCG64(self.seed))
        return (rng.random(X.n_rows) < self.positive_rate).astype(np.int8)

    def to_params(self) -> dict:
        if self.positive_rate is None:
            raise DataError("cannot serialize an unfitted model")
        return {"positive_rate": self.positive_rate, "seed": self.seed}

    @classmethod
    def from_params(cls, doc: dict) -> "StratifiedDummy":
        model = cls(seed=doc["seed"])
        model.positive_rate = float(doc["positive_rate"])
        return model
