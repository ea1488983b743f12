"""CART-style decision tree and bagged random forest.

Splits minimize weighted Gini impurity over every (column, midpoint between
consecutive distinct values) candidate, ties broken by lowest column then
lowest threshold.  Nodes grow until pure or unsplittable (no candidate
column has two distinct values); rows with value <= threshold go left.

Trees are stored as flat parallel arrays (column -1 marks a leaf), which
keeps building, prediction, and serialization free of recursion limits.

The forest trains ``n_trees`` trees on bootstrap resamples; each tree owns a
PCG64 generator seeded with ``seed XOR tree_index`` that drives its bootstrap
and the per-split candidate-column draws, so training is reproducible and
independent of any parallel scheduling.
"""

from __future__ import annotations

import math

import numpy as np
from joblib import Parallel, delayed

from ..errors import ConfigError, DataError
from ..features import FeatureMatrix
from .base import as_label_codes, check_dim, register_model


def _weighted_gini_curve(cum_n: np.ndarray, cum_pos: np.ndarray, n: int, n_pos: int) -> np.ndarray:
    """Weighted Gini impurity for splitting after each value group.

    ``gini = 2*pos*(count-pos)/count^2``; the weighted sum over both sides
    reduces to ``(2/n) * (pos_l*neg_l/n_l + pos_r*neg_r/n_r)``.
    """
    n_l = cum_n
    pos_l = cum_pos
    n_r = n - n_l
    pos_r = n_pos - pos_l
    left = pos_l * (n_l - pos_l) / n_l
    right = pos_r * (n_r - pos_r) / n_r
    return 2.0 * (left + right) / n


def _best_split_over_columns(
    sub_csc, y_node: np.ndarray, n: int, n_pos: int
) -> tuple[float, int, float] | None:
    """Best (weighted gini, local column, threshold) across every column of
    ``sub_csc`` at once, or None if no column is splittable.

    Equivalent to scanning columns in ascending order with
    :func:`_best_split_for_column` and keeping the first strict minimum:
    candidate boundaries are materialized sorted by (column, value), so the
    first argmin hit preserves the lowest-column, lowest-threshold tie-break.
    """
    indptr, indices, data = sub_csc.indptr, sub_csc.indices, sub_csc.data
    n_cols = len(indptr) - 1
    y_nz = y_node[indices].astype(np.int64)

    # per-column nonzero counts and positive-label sums (safe for empty cols)
    cum_y = np.concatenate(([0], np.cumsum(y_nz)))
    col_nnz = np.diff(indptr)
    col_pos = cum_y[indptr[1:]] - cum_y[indptr[:-1]]

    # distinct (column, value) groups over the nonzero entries
    col_ids = np.repeat(np.arange(n_cols), col_nnz)
    order = np.lexsort((data, col_ids))
    v_s = data[order]
    c_s = col_ids[order]
    y_s = y_nz[order]
    if len(v_s):
        starts = np.flatnonzero(
            np.concatenate(([True], (c_s[1:] != c_s[:-1]) | (v_s[1:] != v_s[:-1])))
        )
        g_col = c_s[starts]
        g_val = v_s[starts]
        g_n = np.diff(np.concatenate((starts, [len(v_s)])))
        cum_ys = np.concatenate(([0], np.cumsum(y_s)))
        g_pos = cum_ys[np.concatenate((starts[1:], [len(v_s)]))] - cum_ys[starts]
    else:
        g_col = np.empty(0, dtype=np.int64)
        g_val = np.empty(0)
        g_n = np.empty(0, dtype=np.int64)
        g_pos = np.empty(0, dtype=np.int64)

    # implicit zero groups for columns not fully dense in this node
    zero_cols = np.flatnonzero(col_nnz < n)
    if len(zero_cols):
        g_col = np.concatenate((g_col, zero_cols))
        g_val = np.concatenate((g_val, np.zeros(len(zero_cols))))
        g_n = np.concatenate((g_n, n - col_nnz[zero_cols]))
        g_pos = np.concatenate((g_pos, n_pos - col_pos[zero_cols]))
        merge = np.lexsort((g_val, g_col))
        g_col, g_val, g_n, g_pos = g_col[merge], g_val[merge], g_n[merge], g_pos[merge]
    if len(g_col) < 2:
        return None

    # segmented (per-column) cumulative counts
    new_col = np.concatenate(([True], g_col[1:] != g_col[:-1]))
    block_id = np.cumsum(new_col) - 1
    cum_n = np.cumsum(g_n)
    cum_pos = np.cumsum(g_pos)
    block_starts = np.flatnonzero(new_col)
    base_n = np.where(block_starts > 0, cum_n[block_starts - 1], 0)
    base_pos = np.where(block_starts > 0, cum_pos[block_starts - 1], 0)
    left_n_all = cum_n - base_n[block_id]
    left_pos_all = cum_pos - base_pos[block_id]

    # boundaries: every group that is not the last of its column block
    bound = np.flatnonzero(np.concatenate((g_col[1:] == g_col[:-1], [False])))
    if not len(bound):
        return None
    thresholds = (g_val[bound] + g_val[bound + 1]) / 2.0
    valid = thresholds < g_val[bound + 1]
    if not valid.any():
        return None
    weighted = _weighted_gini_curve(
        left_n_all[bound].astype(np.float64), left_pos_all[bound].astype(np.float64), n, n_pos
    )
    weighted = np.where(valid, weighted, np.inf)
    best = int(np.argmin(weighted))
    if not np.isfinite(weighted[best]):
        return None
    return float(weighted[best]), int(g_col[bound[best]]), float(thresholds[best])


def _best_split_for_column(
    v_nz: np.ndarray,
    y_nz: np.ndarray,
    zero_count: int,
    zero_pos: int,
    n: int,
    n_pos: int,
) -> tuple[float, float] | None:
    """Best (weighted gini, threshold) for one column, or None if unsplittable.

    ``v_nz``/``y_nz`` are the explicit values (all of them for dense data;
    the nonzeros for sparse data, with the implicit zeros passed as a block).
    """
    order = np.argsort(v_nz, kind="stable")
    v_s = v_nz[order]
    y_s = y_nz[order]
    # distinct value groups with per-group row and positive-label counts
    if len(v_s):
        starts = np.flatnonzero(np.concatenate(([True], v_s[1:] != v_s[:-1])))
        group_vals = v_s[starts]
        group_n = np.diff(np.concatenate((starts, [len(v_s)])))
        group_pos = np.add.reduceat(y_s.astype(np.int64), starts)
    else:
        group_vals = np.empty(0)
        group_n = np.empty(0, dtype=np.int64)
        group_pos = np.empty(0, dtype=np.int64)
    if zero_count:
        k = int(np.searchsorted(group_vals, 0.0, side="left"))
        group_vals = np.insert(group_vals, k, 0.0)
        group_n = np.insert(group_n, k, zero_count)
        group_pos = np.insert(group_pos, k, zero_pos)
    if len(group_vals) < 2:
        return None
    cum_n = np.cumsum(group_n)[:-1]
    cum_pos = np.cumsum(group_pos)[:-1]
    weighted = _weighted_gini_curve(cum_n.astype(np.float64), cum_pos.astype(np.float64), n, n_pos)
    thresholds = (group_vals[:-1] + group_vals[1:]) / 2.0
    # guard against float midpoints rounding up into the right-hand group
    valid = thresholds < group_vals[1:]
    if not valid.any():
        return None
    weighted = np.where(valid, weighted, np.inf)
    best = int(np.argmin(weighted))
    return float(weighted[best]), float(thresholds[best])


class _FlatTree:
    """Parallel-array tree representation shared by DecisionTree and forests."""

    __slots__ = ("columns", "thresholds", "lefts", "rights", "counts")

    def __init__(self):
        self.columns: list[int] = []
        self.thresholds: list[float] = []
        self.lefts: list[int] = []
        self.rights: list[int] = []
        self.counts: list[tuple[int, int]] = []

    def add_node(self, n_neg: int, n_pos: int) -> int:
        self.columns.append(-1)
        self.thresholds.append(0.0)
        self.lefts.append(-1)
        self.rights.append(-1)
        self.counts.append((n_neg, n_pos))
        return len(self.columns) - 1

    def n_nodes(self) -> int:
        return len(self.columns)

    def predict_row(self, row_indices: np.ndarray, row_data: np.ndarray) -> int:
        node = 0
        while self.columns[node] != -1:
            col = self.columns[node]
            pos = int(np.searchsorted(row_indices, col))
            value = row_data[pos] if pos < len(row_indices) and row_indices[pos] == col else 0.0
            node = self.lefts[node] if value <= self.thresholds[node] else self.rights[node]
        n_neg, n_pos = self.counts[node]
        return 1 if n_pos >= n_neg else 0

    def to_params(self) -> dict:
        return {
            "columns": self.columns,
            "thresholds": [float(t) for t in self.thresholds],
            "lefts": self.lefts,
            "rights": self.rights,
            "counts": [list(c) for c in self.counts],
        }

    @classmethod
    def from_params(cls, doc: dict) -> "_FlatTree":
        tree = cls()
        tree.columns = [int(c) for c in doc["columns"]]
        tree.thresholds = [float(t) for t in doc["thresholds"]]
        tree.lefts = [int(x) for x in doc["lefts"]]
        tree.rights = [int(x) for x in doc["rights"]]
        tree.counts = [(int(a), int(b)) for a, b in doc["counts"]]
        return tree


def _grow_tree(
    mat_csr,
    y: np.ndarray,
    root_rows: np.ndarray,
    max_features: int | None,
    rng: np.random.Generator | None,
) -> _FlatTree:
    """Depth-first tree growth on a row subset (which may repeat rows)."""
    tree = _FlatTree()
    d = mat_csr.shape[1]
    stack: list[tuple[np.ndarray, int, bool]] = [(root_rows, -1, False)]
    while stack:
        rows, parent, is_right = stack.pop()
        y_node = y[rows]
        n = len(rows)
        n_pos = int(y_node.sum())
        node_id = tree.add_node(n - n_pos, n_pos)
        if parent >= 0:
            if is_right:
                tree.rights[parent] = node_id
            else:
                tree.lefts[parent] = node_id
        if n < 2 or n_pos == 0 or n_pos == n:
            continue

        sub = mat_csr[rows].tocsc()
        sub.eliminate_zeros()
        if max_features is not None and max_features < d:
            candidates = np.sort(rng.choice(d, size=max_features, replace=False))
            scan = sub[:, candidates]
        else:
            candidates = None
            scan = sub

        best = _best_split_over_columns(scan, y_node, n, n_pos)
        if best is None:
            continue  # unsplittable: no candidate column has two distinct values

        _, local_col, thr = best
        col = int(candidates[local_col]) if candidates is not None else local_col
        lo, hi = sub.indptr[col], sub.indptr[col + 1]
        left_mask = np.full(n, 0.0 <= thr)
        left_mask[sub.indices[lo:hi]] = sub.data[lo:hi] <= thr
        tree.columns[node_id] = col
        tree.thresholds[node_id] = thr
        stack.append((rows[~left_mask], node_id, True))
        stack.append((rows[left_mask], node_id, False))
    return tree


def _predict_tree(tree: _FlatTree, X: FeatureMatrix) -> np.ndarray:
    mat = X.csr()
    out = np.empty(mat.shape[0], dtype=np.int8)
    indptr, indices, data = mat.indptr, mat.indices, mat.data
    for i in range(mat.shape[0]):
        lo, hi = indptr[i], indptr[i + 1]
        out[i] = tree.predict_row(indices[lo:hi], data[lo:hi])
    return out


@register_model("tree")
class DecisionTree:
    needs_seed = False

    def __init__(self, max_features: int | None = None):
        self.max_features = max_features
        self.tree: _FlatTree | None = None
        self.dim: int | None = None

    def fit(self, X: FeatureMatrix, y) -> "DecisionTree":
        codes = as_label_codes(y)
        if X.n_rows != len(codes):
            raise DataError(f"{X.n_rows} rows but {len(codes)} labels")
        if X.n_rows == 0:
            raise DataError("cannot fit a tree on an empty dataset")
        self.dim = X.dim
        self.tree = _grow_tree(X.csr(), codes, np.arange(X.n_rows), None, None)
        return self

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        if self.tree is None:
            raise DataError("model is not fitted")
        check_dim(self.dim, X)
        return _predict_tree(self.tree, X)

    def to_params(self) -> dict:
        if self.tree is None:
            raise DataError("cannot serialize an unfitted model")
        return {"dim": self.dim, "tree": self.tree.to_params()}

    @classmethod
    def from_params(cls, doc: dict) -> "DecisionTree":
        model = cls()
        model.dim = int(doc["dim"])
        model.tree = _FlatTree.from_params(doc["tree"])
        return model


def _fit_forest_tree(mat_csr, codes, seed: int, tree_index: int, bootstrap: bool, m: int | None):
    rng = np.random.Generator(np.random.PCG64(seed ^ tree_index))
    n = mat_csr.shape[0]
    rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
    return _grow_tree(mat_csr, codes, rows, m, rng)


@register_model("forest")
class RandomForest:
    needs_seed = True

    def __init__(
        self,
        n_trees: int = 100,
        max_features: int | str | None = "sqrt",
        bootstrap: bool = True,
        seed: int = 0,
        n_jobs: int = 1,
    ):
        if n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        self.n_trees = int(n_trees)
        self.max_features = max_features
        self.bootstrap = bool(bootstrap)
        self.seed = int(seed)
        self.n_jobs = int(n_jobs)
        self.trees: list[_FlatTree] | None = None
        self.dim: int | None = None

    def _resolve_max_features(self, d: int) -> int | None:
        if self.max_features == "sqrt":
            return min(d, math.isqrt(d - 1) + 1) if d > 1 else 1  # ceil(sqrt(d))
        if self.max_features is None:
            return None
        m = int(self.max_features)
        if m < 1:
            raise ConfigError("max_features must be >= 1")
        return min(m, d)

    def fit(self, X: FeatureMatrix, y) -> "RandomForest":
        codes = as_label_codes(y)
        if X.n_rows != len(codes):
            raise DataError(f"{X.n_rows} rows but {len(codes)} labels")
        if X.n_rows == 0:
            raise DataError("cannot fit a forest on an empty dataset")
        self.dim = X.dim
        mat = X.csr()
        m = self._resolve_max_features(X.dim)
        if m is not None and m >= X.dim:
            m = None  # all columns: skip candidate draws entirely
        jobs = [(self.seed, t, self.bootstrap, m) for t in range(self.n_trees)]
        if self.n_jobs == 1:
            self.trees = [_fit_forest_tree(mat, codes, *job) for job in jobs]
        else:
            self.trees = Parallel(n_jobs=self.n_jobs)(
                delayed(_fit_forest_tree)(mat, codes, *job) for job in jobs
            )
        return self

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        if self.trees is None:
            raise DataError("model is not fitted")
        check_dim(self.dim, X)
        votes = np.zeros(X.n_rows, dtype=np.int64)
        for tree in self.trees:
            votes += _predict_tree(tree, X)
        # majority vote; exact ties go to the positive class
        return (2 * votes >= self.n_trees).astype(np.int8)

    def to_params(self) -> dict:
        if self.trees is None:
            raise DataError("cannot serialize an unfitted model")
        return {
            "dim": self.dim,
            "n_trees": self.n_trees,
            "max_features": self.max_features if self.max_features is None or isinstance(self.max_features, str) else int(self.max_features),
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "trees": [t.to_params() for t in self.trees],
        }

    @classmethod
    def from_params(cls, doc: dict) -> "RandomForest":
        model = cls(
            n_trees=doc["n_trees"],
            max_features=doc["max_features"],
            bootstrap=doc["bootstrap"],
            seed=doc["seed"],
        )
        model.dim = int(doc["dim"])
        model.trees = [_FlatTree.from_params(t) for t in doc["trees"]]
        return model
