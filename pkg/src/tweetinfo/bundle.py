"""Trained experiment bundles: pipeline + fitted featurizer + classifier.

A bundle is what ``train`` writes and ``predict``/``weights`` consume: one
versioned JSON document carrying the cleaning stages, the fitted featurizer,
the fitted model, and the reproducibility config it was trained under.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .corpus import Dataset
from .errors import DataError
from .evaluation import FeaturizerConfig, FittedFeaturizer, ModelConfig, fit_featurizer
from .models import make_model, model_from_document, model_to_document
from .preprocess import PipelineConfig, apply_pipeline_batch
from .serialize import dump_document, dumps, load_document


@dataclass
class TrainedBundle:
    pipeline_cfg: PipelineConfig
    featurizer: FittedFeaturizer
    model: Any
    config: dict[str, Any]


def train_bundle(
    ds: Dataset,
    pipeline_cfg: PipelineConfig,
    feat_cfg: FeaturizerConfig,
    model_cfg: ModelConfig,
    config: dict[str, Any] | None = None,
    jobs: int = 1,
) -> TrainedBundle:
    cleaned = apply_pipeline_batch(pipeline_cfg, ds.texts, jobs=jobs)
    featurizer = fit_featurizer(feat_cfg, cleaned)
    model = make_model(model_cfg.kind, model_cfg.params, model_cfg.seed)
    model.fit(featurizer.transform_batch(cleaned), ds.label_codes())
    run_config = dict(config or {})
    run_config.setdefault("pipeline", pipeline_cfg.stage_names())
    run_config.setdefault("featurizer", feat_cfg.as_dict())
    run_config.setdefault("model", model_cfg.as_dict())
    return TrainedBundle(pipeline_cfg=pipeline_cfg, featurizer=featurizer, model=model, config=run_config)


def bundle_predict(bundle: TrainedBundle, ds: Dataset, jobs: int = 1) -> np.ndarray:
    cleaned = apply_pipeline_batch(bundle.pipeline_cfg, ds.texts, jobs=jobs)
    return bundle.model.predict(bundle.featurizer.transform_batch(cleaned))


def save_bundle(bundle: TrainedBundle, path: str | Path) -> None:
    doc = dump_document(
        "tweetinfo.model",
        {
            "kind": "bundle",
            "pipeline": bundle.pipeline_cfg.stage_names(),
            "featurizer": json.loads(bundle.featurizer.to_document()),
            "model": json.loads(model_to_document(bundle.model)),
            "config": bundle.config,
        },
    )
    Path(path).write_text(doc, encoding="utf-8")


def load_bundle(path: str | Path) -> TrainedBundle:
    text = Path(path).read_text(encoding="utf-8")
    doc = load_document(text, "tweetinfo.model")
    if doc.get("kind") != "bundle":
        raise DataError(f"expected a bundle document, got {doc.get('kind')!r}")
    featurizer = FittedFeaturizer.from_document(dumps(doc["featurizer"]))
    model = model_from_document(dumps(doc["model"]))
    pipeline_cfg = PipelineConfig.from_stage_names(doc["pipeline"])
    return TrainedBundle(
        pipeline_cfg=pipeline_cfg,
        featurizer=featurizer,
        model=model,
        config=doc.get("config", {}),
    )
