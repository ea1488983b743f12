"""k-nearest-neighbor classifier (Euclidean metric, majority vote).

Neighbor order is (distance, training index) ascending, so ranking is fully
deterministic.  Vote ties break by the smaller summed distance among the
tied classes' neighbors, then toward the positive class.  Training rows are
L2-normalized TF-IDF in the primary workflow, where Euclidean ranking equals
cosine ranking.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import DataError
from ..features import FeatureMatrix
from .base import as_label_codes, check_dim, register_model


@register_model("knn")
class KNearestNeighbors:
    needs_seed = False

    def __init__(self, k: int = 5):
        if k < 1:
            raise DataError("k must be >= 1")
        self.k = int(k)
        self._train: FeatureMatrix | None = None
        self._labels: np.ndarray | None = None

    def fit(self, X: FeatureMatrix, y) -> "KNearestNeighbors":
        codes = as_label_codes(y)
        if X.n_rows != len(codes):
            raise DataError(f"{X.n_rows} rows but {len(codes)} labels")
        if self.k > X.n_rows:
            raise DataError(f"k={self.k} exceeds training size {X.n_rows}")
        self._train = X
        self._labels = codes
        return self

    def _distances(self, X: FeatureMatrix) -> np.ndarray:
        """Pairwise Euclidean distances, queries x training rows."""
        train = self._train
        if train.is_sparse or X.is_sparse:
            a = X.csr()
            b = train.csr()
            sq_a = np.asarray(a.multiply(a).sum(axis=1)).ravel()
            sq_b = np.asarray(b.multiply(b).sum(axis=1)).ravel()
            cross = a @ b.T
            if sp.issparse(cross):
                cross = np.asarray(cross.todense())
        else:
            a = X.dense()
            b = train.dense()
            sq_a = np.sum(a * a, axis=1)
            sq_b = np.sum(b * b, axis=1)
            cross = a @ b.T
        d2 = sq_a[:, None] + sq_b[None, :] - 2.0 * cross
        return np.sqrt(np.maximum(d2, 0.0))

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        if self._train is None:
            raise DataError("model is not fitted")
        check_dim(self._train.dim, X)
        dists = self._distances(X)
        n_train = self._train.n_rows
        labels = self._labels
        out = np.empty(X.n_rows, dtype=np.int8)
        order_keys = np.arange(n_train)
        for i in range(X.n_rows):
            order = np.lexsort((order_keys, dists[i]))[: self.k]
            neigh_labels = labels[order]
            neigh_dists = dists[i][order]
            pos = int(neigh_labels.sum())
            neg = self.k - pos
            if pos != neg:
                out[i] = 1 if pos > neg else 0
            else:
                pos_sum = float(neigh_dists[neigh_labels == 1].sum())
                neg_sum = float(neigh_dists[neigh_labels == 0].sum())
                out[i] = 1 if pos_sum <= neg_sum else 0
        return out

    def to_params(self) -> dict:
        if self._train is None:
            raise DataError("cannot serialize an unfitted model")
        mat = self._train.csr()
        return {
            "k": self.k,
            "dim": self._train.dim,
            "labels": [int(x) for x in self._labels],
            "matrix": {
                "indptr": [int(x) for x in mat.indptr],
                "indices": [int(x) for x in mat.indices],
                "data": [float(x) for x in mat.data],
            },
        }

    @classmethod
    def from_params(cls, doc: dict) -> "KNearestNeighbors":
        model = cls(k=doc["k"])
        m = doc["matrix"]
        csr = sp.csr_matrix(
            (np.array(m["data"]), np.array(m["indices"], dtype=np.int64), np.array(m["indptr"], dtype=np.int64)),
            shape=(len(doc["labels"]), doc["dim"]),
        )
        model._train = FeatureMatrix(csr)
        model._labels = np.array(doc["labels"], dtype=np.int8)
        return model
