"""Soft-margin RBF-kernel SVM trained by sequential minimal optimization.

Solves the dual problem

    min  0.5 * a' Q a - e' a    s.t.  y' a = 0,  0 <= a_i <= C

with Q_ij = y_i y_j K(x_i, x_j) and K(u, v) = exp(-gamma * ||u - v||^2).
Each step picks the maximal-violating pair (the steepest feasible ascent
pair over the box), solves the two-variable subproblem analytically, and
clips to the box; convergence is declared when the maximal KKT violation
m(a) - M(a) drops to ``tol``.  The intercept comes from free support
vectors when any exist, else from the violation bounds' midpoint.

``gamma="scale"`` resolves to 1 / (n_features * Var(X)) over all matrix
entries (1.0 when the variance is zero).
"""

from __future__ import annotations

from collections import OrderedDict

import numpy as np

from ..errors import ConfigError, DataError
from ..features import FeatureMatrix
from .base import as_label_codes, check_dim, register_model

_TAU = 1e-12


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * squared Euclidean distance), rows of a x rows of b."""
    sq_a = np.sum(a * a, axis=1)
    sq_b = np.sum(b * b, axis=1)
    d2 = np.maximum(sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T), 0.0)
    return np.exp(-gamma * d2)


class _KernelCache:
    """LRU cache of kernel rows; avoids the full n x n matrix on big inputs."""

    def __init__(self, X: np.ndarray, gamma: float, max_rows: int):
        self._X = X
        self._gamma = gamma
        self._sq = np.sum(X * X, axis=1)
        self._max_rows = max(2, max_rows)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        hit = self._rows.get(i)
        if hit is not None:
            self._rows.move_to_end(i)
            return hit
        d2 = np.maximum(self._sq + self._sq[i] - 2.0 * (self._X @ self._X[i]), 0.0)
        row = np.exp(-self._gamma * d2)
        self._rows[i] = row
        if len(self._rows) > self._max_rows:
            self._rows.popitem(last=False)
        return row


@register_model("svm")
class SupportVectorMachine:
    needs_seed = False

    def __init__(
        self,
        C: float = 1.0,
        gamma: float | str = "scale",
        tol: float = 1e-3,
        max_iter: int = 10_000_000,
        cache_rows: int = 1024,
    ):
        if C <= 0:
            raise ConfigError("C must be positive")
        if tol <= 0:
            raise ConfigError("tol must be positive")
        if isinstance(gamma, str):
            if gamma != "scale":
                raise ConfigError(f"gamma must be a positive number or 'scale', got {gamma!r}")
        elif gamma <= 0:
            raise ConfigError("gamma must be positive")
        self.C = float(C)
        self.gamma = gamma
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.cache_rows = int(cache_rows)
        self.gamma_value: float | None = None
        self.support_vectors: np.ndarray | None = None
        self.dual_coef: np.ndarray | None = None  # alpha_i * y_i for support vectors
        self.intercept = 0.0
        self.converged = False
        self.n_iter = 0

    def _resolve_gamma(self, X: np.ndarray) -> float:
        if self.gamma == "scale":
            var = float(X.var())
            return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        return float(self.gamma)

    def fit(self, X: FeatureMatrix, y) -> "SupportVectorMachine":
        codes = as_label_codes(y, require_both_classes=True)
        dense = X.dense()
        if dense.shape[0] != len(codes):
            raise DataError(f"{dense.shape[0]} rows but {len(codes)} labels")
        if not np.isfinite(dense).all():
            raise DataError("features must be finite")
        y_signed = np.where(codes == 1, 1.0, -1.0)
        gamma = self._resolve_gamma(dense)
        self.gamma_value = gamma
        n = dense.shape[0]

        kernel = _KernelCache(dense, gamma, self.cache_rows)

        def q_row(i: int) -> np.ndarray:
            return y_signed[i] * (y_signed * kernel.row(i))

        alpha = np.zeros(n)
        grad = -np.ones(n)
        C = self.C
        self.converged = False
        it = 0
        while it < self.max_iter:
            at_upper = alpha >= C
            at_lower = alpha <= 0
            in_up = np.where(y_signed > 0, ~at_upper, ~at_lower)
            in_low = np.where(y_signed > 0, ~at_lower, ~at_upper)
            vals = -y_signed * grad
            up_vals = np.where(in_up, vals, -np.inf)
            low_vals = np.where(in_low, vals, np.inf)
            i = int(np.argmax(up_vals))
            j = int(np.argmin(low_vals))
            m_up = up_vals[i]
            m_low = low_vals[j]
            if not np.isfinite(m_up) or not np.isfinite(m_low):
                break  # box fully saturated on one side
            if m_up - m_low <= self.tol:
                self.converged = True
                break

            qi = q_row(i)
            qj = q_row(j)
            old_i, old_j = alpha[i], alpha[j]
            quad = qi[i] + qj[j] - 2.0 * y_signed[i] * y_signed[j] * qi[j]
            if quad <= 0:
                quad = _TAU
            if y_signed[i] != y_signed[j]:
                delta = (-grad[i] - grad[j]) / quad
                diff = alpha[i] - alpha[j]
                alpha[i] += delta
                alpha[j] += delta
                if diff > 0:
                    if alpha[j] < 0:
                        alpha[j] = 0.0
                        alpha[i] = diff
                else:
                    if alpha[i] < 0:
                        alpha[i] = 0.0
                        alpha[j] = -diff
                if diff > 0:
                    if alpha[i] > C:
                        alpha[i] = C
                        alpha[j] = C - diff
                else:
                    if alpha[j] > C:
                        alpha[j] = C
                        alpha[i] = C + diff
            else:
                delta = (grad[i] - grad[j]) / quad
                total = alpha[i] + alpha[j]
                alpha[i] -= delta
                alpha[j] += delta
                if total > C:
                    if alpha[i] > C:
                        alpha[i] = C
                        alpha[j] = total - C
                else:
                    if alpha[j] < 0:
                        alpha[j] = 0.0
                        alpha[i] = total
                if total > C:
                    if alpha[j] > C:
                        alpha[j] = C
                        alpha[i] = total - C
                else:
                    if alpha[i] < 0:
                        alpha[i] = 0.0
                        alpha[j] = total
            grad += qi * (alpha[i] - old_i) + qj * (alpha[j] - old_j)
            it += 1
        self.n_iter = it

        # intercept from free support vectors, else violation-bound midpoint
        y_grad = y_signed * grad
        free = (alpha > 0) & (alpha < C)
        if free.any():
            rho = float(y_grad[free].mean())
        else:
            upper = np.where((alpha >= C) & (y_signed < 0) | (alpha <= 0) & (y_signed > 0), y_grad, np.inf)
            lower = np.where((alpha >= C) & (y_signed > 0) | (alpha <= 0) & (y_signed < 0), y_grad, -np.inf)
            rho = (float(upper.min()) + float(lower.max())) / 2.0
        self.intercept = -rho

        sv = alpha > 0
        self.support_vectors = dense[sv].copy()
        self.dual_coef = (alpha * y_signed)[sv]
        self._alpha = alpha  # kept for diagnostics/tests
        self._y_signed = y_signed
        return self

    def decision_scores(self, X: FeatureMatrix) -> np.ndarray:
        if self.support_vectors is None:
            raise DataError("model is not fitted")
        check_dim(self.support_vectors.shape[1], X)
        k = rbf_kernel(X.dense(), self.support_vectors, self.gamma_value)
        return k @ self.dual_coef + self.intercept

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        return (self.decision_scores(X) >= 0).astype(np.int8)

    def to_params(self) -> dict:
        if self.support_vectors is None:
            raise DataError("cannot serialize an unfitted model")
        return {
            "C": self.C,
            "gamma": self.gamma if isinstance(self.gamma, str) else float(self.gamma),
            "gamma_value": float(self.gamma_value),
            "tol": self.tol,
            "dim": int(self.support_vectors.shape[1]),
            "support_vectors": [[float(v) for v in row] for row in self.support_vectors],
            "dual_coef": [float(v) for v in self.dual_coef],
            "intercept": float(self.intercept),
            "converged": self.converged,
            "n_iter": self.n_iter,
        }

    @classmethod
    def from_params(cls, doc: dict) -> "SupportVectorMachine":
        model = cls(C=doc["C"], gamma=doc["gamma"], tol=doc["tol"])
        model.gamma_value = float(doc["gamma_value"])
        model.support_vectors = np.array(doc["support_vectors"], dtype=np.float64).reshape(
            len(doc["dual_coef"]), int(doc["dim"])
        )
        model.dual_coef = np.array(doc["dual_coef"])
        model.intercept = float(doc["intercept"])
        model.converged = bool(doc["converged"])
        model.n_iter = int(doc["n_iter"])
        return model
