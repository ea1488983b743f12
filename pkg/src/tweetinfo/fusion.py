"""Embedding-table ingestion and embedding + engineered-feature fusion.

The interchange format ("EMB1") is line-oriented UTF-8: a header line
``#emb v1 dim=<D>`` followed by ``<tweet_id><TAB><D space-separated floats>``
rows.  Fusion concatenates each tweet's embedding with its seven engineered
features (in their fixed order) and trains the RBF-kernel SVM on the result.

By default the engineered slots are plain-concatenated, matching the
published pipeline; ``standardize_engineered`` optionally z-scores them with
training-split statistics because RBF kernels are scale-sensitive and the
engineered slots are much larger than embedding coordinates.  Runs using the
flag are labeled as a deviation in their reports.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .corpus import Dataset
from .errors import DataError
from .evaluation import HoldoutResult, confusion, macro_f1, score
from .features import FeatureMatrix, tweet_features
from .models.svm import SupportVectorMachine
from .serialize import dump_document, format_float, load_document

_HEADER_RE = re.compile(r"^#emb v1 dim=(\d+)$")

N_ENGINEERED = 7


@dataclass(frozen=True)
class EmbeddingTable:
    """tweet id -> fixed-dimension real vector."""

    dim: int
    vectors: dict[str, np.ndarray] = field(repr=False)

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, tweet_id: str) -> bool:
        return tweet_id in self.vectors

    def get(self, tweet_id: str) -> np.ndarray:
        try:
            return self.vectors[tweet_id]
        except KeyError:
            raise DataError(f"no embedding for tweet id {tweet_id!r}") from None


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Parse and validate an EMB1 file; every error names its line."""
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    lines = [line[:-1] if line.endswith("\r") else line for line in lines]
    if not lines or (header := _HEADER_RE.match(lines[0])) is None:
        raise DataError("missing or malformed header (expected '#emb v1 dim=<D>')", line=1)
    dim = int(header.group(1))
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise DataError(f"expected 'id<TAB>floats', found {len(cols)} columns", line=lineno)
        tweet_id = cols[0]
        if tweet_id in vectors:
            raise DataError(f"duplicate tweet id {tweet_id!r}", line=lineno)
        parts = cols[1].split()
        if len(parts) != dim:
            raise DataError(f"expected {dim} values, found {len(parts)}", line=lineno)
        try:
            vec = np.array([float(p) for p in parts])
        except ValueError as exc:
            raise DataError(f"bad float: {exc}", line=lineno) from None
        if not np.isfinite(vec).all():
            raise DataError("non-finite embedding value", line=lineno)
        vectors[tweet_id] = vec
    return EmbeddingTable(dim=dim, vectors=vectors)


def write_embeddings(ids: list[str], matrix: np.ndarray, path: str | Path) -> None:
    """Write an EMB1 file (LF endings, 17-significant-digit floats)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != len(ids):
        raise DataError("matrix must be 2-D with one row per id")
    out = [f"#emb v1 dim={matrix.shape[1]}"]
    for tweet_id, row in zip(ids, matrix):
        out.append(tweet_id + "\t" + " ".join(format_float(v) for v in row))
    Path(path).write_text("".join(line + "\n" for line in out), encoding="utf-8")


@dataclass(frozen=True)
class FusionConfig:
    standardize_engineered: bool = False
    C: float = 1.0
    gamma: float | str = "scale"
    tol: float = 1e-3

    def as_dict(self) -> dict[str, Any]:
        return {
            "standardize_engineered": self.standardize_engineered,
            "C": self.C,
            "gamma": self.gamma if isinstance(self.gamma, str) else float(self.gamma),
            "tol": self.tol,
        }


@dataclass(frozen=True)
class EngineeredScaler:
    """Per-slot z-score statistics for the engineered features."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, block: np.ndarray) -> np.ndarray:
        out = np.zeros_like(block)
        nonconst = self.std > 0
        out[:, nonconst] = (block[:, nonconst] - self.mean[nonconst]) / self.std[nonconst]
        return out


def engineered_block(ds: Dataset) -> np.ndarray:
    """The 7 engineered features per record, computed on the raw text."""
    return np.stack([tweet_features(text).as_array() for text in ds.texts])


def fit_scaler(ds: Dataset) -> EngineeredScaler:
    block = engineered_block(ds)
    return EngineeredScaler(mean=block.mean(axis=0), std=block.std(axis=0))


def fuse(
    table: EmbeddingTable,
    ds: Dataset,
    cfg: FusionConfig = FusionConfig(),
    scaler: EngineeredScaler | None = None,
) -> FeatureMatrix:
    """Rows of embedding ++ engineered features, in dataset order.

    With ``standardize_engineered`` a scaler must come from the training
    split; when none is supplied the statistics of ``ds`` itself are used
    (fitting-time behavior).
    """
    emb = np.stack([table.get(r.tweet.id) for r in ds.records]) if len(ds) else np.zeros((0, table.dim))
    block = engineered_block(ds) if len(ds) else np.zeros((0, N_ENGINEERED))
    if cfg.standardize_engineered:
        if scaler is None:
            scaler = EngineeredScaler(mean=block.mean(axis=0), std=block.std(axis=0))
        block = scaler.apply(block)
    return FeatureMatrix(np.hstack([emb, block]))


@dataclass
class FusionModel:
    svm: SupportVectorMachine
    config: FusionConfig
    embedding_dim: int
    scaler: EngineeredScaler | None = None


def train_fusion(table: EmbeddingTable, train_ds: Dataset, cfg: FusionConfig = FusionConfig()) -> FusionModel:
    if len(train_ds) == 0:
        raise DataError("cannot train on an empty dataset")
    scaler = fit_scaler(train_ds) if cfg.standardize_engineered else None
    X = fuse(table, train_ds, cfg, scaler)
    svm = SupportVectorMachine(C=cfg.C, gamma=cfg.gamma, tol=cfg.tol)
    svm.fit(X, train_ds.label_codes())
    return FusionModel(svm=svm, config=cfg, embedding_dim=table.dim, scaler=scaler)


def fusion_predict(model: FusionModel, table: EmbeddingTable, ds: Dataset) -> np.ndarray:
    if table.dim != model.embedding_dim:
        raise DataError(f"embedding dim {table.dim} does not match model dim {model.embedding_dim}")
    X = fuse(table, ds, model.config, model.scaler)
    return model.svm.predict(X)


def eval_fusion(model: FusionModel, table: EmbeddingTable, eval_ds: Dataset) -> HoldoutResult:
    pred = fusion_predict(model, table, eval_ds)
    gold = eval_ds.label_codes()
    return HoldoutResult(
        metrics=score(pred, gold),
        macro_f1=macro_f1(pred, gold),
        confusion=confusion(pred, gold),
        n_eval=len(eval_ds),
    )


# ---------------------------------------------------------------------------
# Serialization

def fusion_to_document(model: FusionModel, config: dict[str, Any] | None = None) -> str:
    body: dict[str, Any] = {
        "kind": "fusion",
        "fusion_config": model.config.as_dict(),
        "embedding_dim": model.embedding_dim,
        "svm": model.svm.to_params(),
    }
    if config is not None:
        body["config"] = config
    if model.scaler is not None:
        body["scaler"] = {
            "mean": [float(x) for x in model.scaler.mean],
            "std": [float(x) for x in model.scaler.std],
        }
    return dump_document("tweetinfo.model", body)


def fusion_from_document(text: str) -> FusionModel:
    doc = load_document(text, "tweetinfo.model")
    if doc.get("kind") != "fusion":
        raise DataError(f"expected a fusion document, got {doc.get('kind')!r}")
    raw_cfg = doc["fusion_config"]
    cfg = FusionConfig(
        standardize_engineered=raw_cfg["standardize_engineered"],
        C=raw_cfg["C"],
        gamma=raw_cfg["gamma"],
        tol=raw_cfg["tol"],
    )
    scaler = None
    if "scaler" in doc:
        scaler = EngineeredScaler(mean=np.array(doc["scaler"]["mean"]), std=np.array(doc["scaler"]["std"]))
    return FusionModel(
        svm=SupportVectorMachine.from_params(doc["svm"]),
        config=cfg,
        embedding_dim=int(doc["embedding_dim"]),
        scaler=scaler,
    )
