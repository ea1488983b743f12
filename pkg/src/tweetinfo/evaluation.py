"""Metrics, the cross-validation harness, and model inspection.

All reported F1 uses INFORMATIVE as the positive class; the JSON reports
additionally carry macro-averaged F1 per fold so both conventions can be
compared against published numbers.  Featurizers are refit on the training
folds only: the fold under evaluation never leaks into vocabulary or idf.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np
from joblib import Parallel, delayed

from . import features as feats
from .corpus import Dataset, FoldPlan, Label
from .errors import ConfigError, DataError
from .models import make_model
from .models.logreg import LogisticRegression
from .preprocess import PipelineConfig, apply_pipeline_batch


# ---------------------------------------------------------------------------
# Metrics

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_confusion(cls, c: ConfusionCounts) -> "Metrics":
        precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) else 0.0
        recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        return cls(precision=precision, recall=recall, f1=f1)

    def as_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def _to_codes(values) -> np.ndarray:
    arr = list(values)
    if arr and isinstance(arr[0], Label):
        return np.array([1 if v is Label.INFORMATIVE else 0 for v in arr], dtype=np.int8)
    return np.asarray(arr, dtype=np.int8)


def confusion(pred, gold, positive: int = 1) -> ConfusionCounts:
    p = _to_codes(pred)
    g = _to_codes(gold)
    if len(p) != len(g):
        raise DataError(f"prediction length {len(p)} != gold length {len(g)}")
    if len(p) == 0:
        raise DataError("cannot score empty label sequences")
    pos_p = p == positive
    pos_g = g == positive
    return ConfusionCounts(
        tp=int(np.sum(pos_p & pos_g)),
        fp=int(np.sum(pos_p & ~pos_g)),
        fn=int(np.sum(~pos_p & pos_g)),
        tn=int(np.sum(~pos_p & ~pos_g)),
    )


def score(pred, gold, positive: int = 1) -> Metrics:
    """Binary precision/recall/F1; 0/0 ratios resolve to 0."""
    return Metrics.from_confusion(confusion(pred, gold, positive=positive))


def macro_f1(pred, gold) -> float:
    """Unweighted mean of per-class F1 over both classes."""
    return (score(pred, gold, positive=1).f1 + score(pred, gold, positive=0).f1) / 2.0


# ---------------------------------------------------------------------------
# Featurizer configuration

_DEFAULT_RANGES = {"counts": (1, 1), "tfidf": (1, 3)}


@dataclass(frozen=True)
class FeaturizerConfig:
    kind: str  # "counts" | "tfidf"
    ngram_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in _DEFAULT_RANGES:
            raise ConfigError(f"unknown featurizer kind {self.kind!r} (known: counts, tfidf)")

    def resolved_range(self) -> tuple[int, int]:
        return self.ngram_range if self.ngram_range is not None else _DEFAULT_RANGES[self.kind]

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "ngram_range": list(self.resolved_range())}


class FittedFeaturizer:
    """A fitted counts vocabulary or TF-IDF model with a uniform transform."""

    def __init__(self, kind: str, fitted):
        self.kind = kind
        self._fitted = fitted

    @property
    def dim(self) -> int:
        return len(self._fitted.vocab) if self.kind == "tfidf" else len(self._fitted)

    @property
    def vocab(self) -> feats.Vocabulary:
        return self._fitted.vocab if self.kind == "tfidf" else self._fitted

    def transform(self, text: str) -> feats.SparseVector:
        if self.kind == "tfidf":
            return feats.transform_tfidf(self._fitted, text)
        return feats.transform_counts(self._fitted, text)

    def transform_batch(self, texts: list[str]) -> feats.FeatureMatrix:
        return feats.FeatureMatrix.from_sparse_vectors([self.transform(t) for t in texts], dim=self.dim)

    def to_document(self) -> str:
        if self.kind == "tfidf":
            return feats.tfidf_to_document(self._fitted)
        return feats.counts_to_document(self._fitted)

    @classmethod
    def from_document(cls, text: str) -> "FittedFeaturizer":
        kind = json.loads(text).get("kind")
        if kind == "tfidf_featurizer":
            return cls("tfidf", feats.tfidf_from_document(text))
        if kind == "counts_featurizer":
            return cls("counts", feats.counts_from_document(text))
        raise DataError(f"unknown featurizer document kind {kind!r}")


def fit_featurizer(cfg: FeaturizerConfig, texts: list[str]) -> FittedFeaturizer:
    rng = cfg.resolved_range()
    if cfg.kind == "tfidf":
        return FittedFeaturizer("tfidf", feats.fit_tfidf(texts, ngram_range=rng))
    return FittedFeaturizer("counts", feats.fit_counts(texts, ngram_range=rng))


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    params: dict[str, Any] | None = None
    seed: int = 0

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "params": dict(self.params or {}), "seed": self.seed}


# ---------------------------------------------------------------------------
# Cross-validation

@dataclass(frozen=True)
class FoldScore:
    fold: int
    n_test: int
    metrics: Metrics
    macro_f1: float
    confusion: ConfusionCounts


@dataclass(frozen=True)
class CvReport:
    folds: tuple[FoldScore, ...]
    mean_f1: float
    std_f1: float
    mean_macro_f1: float
    config: dict[str, Any]

    def as_dict(self) -> dict[str, Any]:
        return {
            "folds": [
                {
                    "fold": f.fold,
                    "n_test": f.n_test,
                    **f.metrics.as_dict(),
                    "macro_f1": f.macro_f1,
                    "confusion": {
                        "tp": f.confusion.tp,
                        "fp": f.confusion.fp,
                        "fn": f.confusion.fn,
                        "tn": f.confusion.tn,
                    },
                }
                for f in self.folds
            ],
            "mean_f1": self.mean_f1,
            "std_f1": self.std_f1,
            "mean_macro_f1": self.mean_macro_f1,
            "config": self.config,
        }


def fit_fold(
    cleaned: list[str],
    codes: np.ndarray,
    plan: FoldPlan,
    fold: int,
    feat_cfg: FeaturizerConfig,
    model_cfg: ModelConfig,
):
    """Fit featurizer and model on every fold except ``fold``.

    The held-out fold's texts are never touched here, which is the no-leakage
    contract the tests pin down.
    """
    train_idx = plan.rest_indices(fold)
    train_texts = [cleaned[i] for i in train_idx]
    featurizer = fit_featurizer(feat_cfg, train_texts)
    model = make_model(model_cfg.kind, model_cfg.params, model_cfg.seed)
    model.fit(featurizer.transform_batch(train_texts), codes[train_idx])
    return featurizer, model


def _run_fold(cleaned, codes, plan, fold, feat_cfg, model_cfg) -> FoldScore:
    featurizer, model = fit_fold(cleaned, codes, plan, fold, feat_cfg, model_cfg)
    test_idx = plan.fold_indices(fold)
    test_texts = [cleaned[i] for i in test_idx]
    pred = model.predict(featurizer.transform_batch(test_texts))
    gold = codes[test_idx]
    return FoldScore(
        fold=fold,
        n_test=len(test_idx),
        metrics=score(pred, gold),
        macro_f1=macro_f1(pred, gold),
        confusion=confusion(pred, gold),
    )


def cross_validate(
    ds: Dataset,
    plan: FoldPlan,
    pipeline_cfg: PipelineConfig,
    feat_cfg: FeaturizerConfig,
    model_cfg: ModelConfig,
    jobs: int = 1,
) -> CvReport:
    if len(plan.assignment) != len(ds):
        raise DataError("fold plan does not cover this dataset")
    codes = ds.label_codes()
    cleaned = apply_pipeline_batch(pipeline_cfg, ds.texts)
    if jobs == 1:
        folds = [_run_fold(cleaned, codes, plan, f, feat_cfg, model_cfg) for f in range(plan.k)]
    else:
        folds = Parallel(n_jobs=jobs)(
            delayed(_run_fold)(cleaned, codes, plan, f, feat_cfg, model_cfg) for f in range(plan.k)
        )
    f1s = np.array([f.metrics.f1 for f in folds])
    config = {
        "pipeline": pipeline_cfg.stage_names(),
        "featurizer": feat_cfg.as_dict(),
        "model": model_cfg.as_dict(),
        "k": plan.k,
        "fold_seed": plan.seed,
        "stratified": True,
    }
    return CvReport(
        folds=tuple(folds),
        mean_f1=float(f1s.mean()),
        std_f1=float(f1s.std(ddof=1)),
        mean_macro_f1=float(np.mean([f.macro_f1 for f in folds])),
        config=config,
    )


# ---------------------------------------------------------------------------
# Holdout evaluation

@dataclass(frozen=True)
class HoldoutResult:
    metrics: Metrics
    macro_f1: float
    confusion: ConfusionCounts
    n_eval: int


def holdout_eval(
    train_ds: Dataset,
    valid_ds: Dataset,
    pipeline_cfg: PipelineConfig,
    feat_cfg: FeaturizerConfig,
    model_cfg: ModelConfig,
) -> HoldoutResult:
    """Single fit on the training set, scored on the validation set."""
    overlap = set(train_ds.ids) & set(valid_ds.ids)
    if overlap:
        raise DataError(f"train/valid id overlap: {sorted(overlap)[:5]}")
    cleaned_train = apply_pipeline_batch(pipeline_cfg, train_ds.texts)
    cleaned_valid = apply_pipeline_batch(pipeline_cfg, valid_ds.texts)
    featurizer = fit_featurizer(feat_cfg, cleaned_train)
    model = make_model(model_cfg.kind, model_cfg.params, model_cfg.seed)
    model.fit(featurizer.transform_batch(cleaned_train), train_ds.label_codes())
    pred = model.predict(featurizer.transform_batch(cleaned_valid))
    gold = valid_ds.label_codes()
    return HoldoutResult(
        metrics=score(pred, gold),
        macro_f1=macro_f1(pred, gold),
        confusion=confusion(pred, gold),
        n_eval=len(valid_ds),
    )


# ---------------------------------------------------------------------------
# Model inspection

def top_weights(
    model: LogisticRegression, vocab: feats.Vocabulary, n: int
) -> list[tuple[str, float]]:
    """Top-n features by |weight|, descending; ties by feature string.

    Zero weights never appear; asking for more features than exist truncates.
    """
    if model.weights is None:
        raise DataError("model is not fitted")
    if len(model.weights) != len(vocab):
        raise DataError("vocabulary does not match model dimension")
    terms = vocab.terms()
    ranked = sorted(
        ((terms[i], float(w)) for i, w in enumerate(model.weights) if w != 0.0),
        key=lambda item: (-abs(item[1]), item[0]),
    )
    return ranked[: max(n, 0)]


# ---------------------------------------------------------------------------
# Report rendering

def report_text_table(report: CvReport, title: str) -> str:
    """Aligned plain-text table in the two-column style of the paper tables."""
    lines = [title, ""]
    lines.append(f"{'Fold':>4}  {'Precision':>9}  {'Recall':>9}  {'F1':>9}  {'Macro-F1':>9}")
    for f in report.folds:
        lines.append(
            f"{f.fold + 1:>4}  {f.metrics.precision:>9.4f}  {f.metrics.recall:>9.4f}"
            f"  {f.metrics.f1:>9.4f}  {f.macro_f1:>9.4f}"
        )
    lines.append("")
    lines.append(f"Mean F1: {report.mean_f1:.4f}  (std {report.std_f1:.4f})")
    lines.append(f"Mean macro-F1: {report.mean_macro_f1:.4f}")
    return "\n".join(lines) + "\n"
