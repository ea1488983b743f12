"""L2-regularized logistic regression trained by Newton-CG.

Minimizes ``0.5 * ||w||^2 + C * sum_i log(1 + exp(-y_i (w.x_i + b)))`` with
labels in {-1, +1} and an unregularized intercept.  The solver is a damped
Newton iteration from w = 0, b = 0: the Newton system is solved by conjugate
gradients on Hessian-vector products (never materializing the Hessian, which
keeps sparse feature matrices cheap), and an Armijo backtracking line search
makes the objective non-increasing.  Fully deterministic.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..features import FeatureMatrix
from .base import as_label_codes, check_dim, register_model


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@register_model("logreg")
class LogisticRegression:
    needs_seed = False

    def __init__(self, C: float = 1.0, tol: float = 1e-4, max_iter: int = 1000):
        if C <= 0 or tol <= 0 or max_iter < 1:
            raise DataError("C and tol must be positive, max_iter >= 1")
        self.C = float(C)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.weights: np.ndarray | None = None
        self.intercept = 0.0
        self.converged = False
        self.n_iter = 0

    # -- objective pieces -------------------------------------------------

    @staticmethod
    def objective(mat, y_signed: np.ndarray, C: float, w: np.ndarray, b: float) -> float:
        margins = y_signed * (mat @ w + b)
        return 0.5 * float(w @ w) + C * float(np.logaddexp(0.0, -margins).sum())

    @staticmethod
    def gradient(mat, y_signed: np.ndarray, C: float, w: np.ndarray, b: float):
        margins = y_signed * (mat @ w + b)
        s = _sigmoid(-margins)
        g_w = w - C * (mat.T @ (y_signed * s))
        g_b = -C * float(np.sum(y_signed * s))
        return g_w, g_b, s

    # -- training ----------------------------------------------------------

    def fit(self, X: FeatureMatrix, y) -> "LogisticRegression":
        codes = as_label_codes(y, require_both_classes=True)
        if X.n_rows != len(codes):
            raise DataError(f"{X.n_rows} rows but {len(codes)} labels")
        mat = X.csr() if X.is_sparse else X.dense()
        y_signed = np.where(codes == 1, 1.0, -1.0)
        d = X.dim
        w = np.zeros(d)
        b = 0.0
        f = self.objective(mat, y_signed, self.C, w, b)
        self.converged = False
        for it in range(self.max_iter):
            g_w, g_b, s = self.gradient(mat, y_signed, self.C, w, b)
            gnorm = max(float(np.max(np.abs(g_w))) if d else 0.0, abs(g_b))
            if gnorm <= self.tol:
                self.converged = True
                break

            diag = s * (1.0 - s)  # sigma(m) * sigma(-m)

            def hess_vec(v_w: np.ndarray, v_b: float):
                t = mat @ v_w + v_b
                u = diag * t
                return v_w + self.C * (mat.T @ u), self.C * float(u.sum())

            p_w, p_b = self._cg(hess_vec, -g_w, -g_b, gnorm)
            slope = float(g_w @ p_w) + g_b * p_b
            if slope >= 0:  # CG returned a non-descent direction; fall back
                p_w, p_b = -g_w, -g_b
                slope = -(float(g_w @ g_w) + g_b * g_b)
            step = 1.0
            for _ in range(60):
                f_new = self.objective(mat, y_signed, self.C, w + step * p_w, b + step * p_b)
                if f_new <= f + 1e-4 * step * slope:
                    break
                step *= 0.5
            else:
                break  # no further progress at float precision
            w = w + step * p_w
            b = b + step * p_b
            f = f_new
            self.n_iter = it + 1
        else:
            g_w, g_b, _ = self.gradient(mat, y_signed, self.C, w, b)
            gnorm = max(float(np.max(np.abs(g_w))) if d else 0.0, abs(g_b))
            self.converged = gnorm <= self.tol
        self.weights = w
        self.intercept = b
        return self

    @staticmethod
    def _cg(hess_vec, rhs_w: np.ndarray, rhs_b: float, gnorm: float):
        """Solve H p = rhs by conjugate gradients (truncated-Newton forcing)."""
        p_w = np.zeros_like(rhs_w)
        p_b = 0.0
        r_w, r_b = rhs_w.copy(), rhs_b
        d_w, d_b = r_w.copy(), r_b
        rs = float(r_w @ r_w) + r_b * r_b
        tol2 = (min(0.5, np.sqrt(gnorm)) * gnorm) ** 2
        for _ in range(max(20, min(300, len(rhs_w) + 1))):
            if rs <= tol2:
                break
            hd_w, hd_b = hess_vec(d_w, d_b)
            curv = float(d_w @ hd_w) + d_b * hd_b
            if curv <= 0:
                break
            alpha = rs / curv
            p_w += alpha * d_w
            p_b += alpha * d_b
            r_w -= alpha * hd_w
            r_b -= alpha * hd_b
            rs_new = float(r_w @ r_w) + r_b * r_b
            d_w = r_w + (rs_new / rs) * d_w
            d_b = r_b + (rs_new / rs) * d_b
            rs = rs_new
        return p_w, p_b

    # -- inference ----------------------------------------------------------

    def decision_scores(self, X: FeatureMatrix) -> np.ndarray:
        if self.weights is None:
            raise DataError("model is not fitted")
        check_dim(len(self.weights), X)
        mat = X.csr() if X.is_sparse else X.dense()
        return mat @ self.weights + self.intercept

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        return (self.decision_scores(X) >= 0).astype(np.int8)

    # -- serialization -------------------------------------------------------

    def to_params(self) -> dict:
        if self.weights is None:
            raise DataError("cannot serialize an unfitted model")
        return {
            "C": self.C,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "weights": [float(x) for x in self.weights],
            "intercept": float(self.intercept),
            "converged": self.converged,
            "n_iter": self.n_iter,
        }

    @classmethod
    def from_params(cls, doc: dict) -> "LogisticRegression":
        model = cls(C=doc["C"], tol=doc["tol"], max_iter=doc["max_iter"])
        model.weights = np.array(doc["weights"])
        model.intercept = float(doc["intercept"])
        model.converged = bool(doc["converged"])
        model.n_iter = int(doc["n_iter"])
        return model
