"""Shared model plumbing: label validation, registry, serialization envelope."""

from __future__ import annotations

from typing import Any

import numpy as np

from ..errors import ConfigError, DataError
from ..serialize import dump_document, load_document


def as_label_codes(y, require_both_classes: bool = False) -> np.ndarray:
    """Coerce to an int8 array of {0, 1} codes."""
    codes = np.asarray(y, dtype=np.int8)
    if codes.ndim != 1:
        raise DataError("labels must be a 1-D array")
    bad = set(np.unique(codes)) - {0, 1}
    if bad:
        raise DataError(f"label codes must be 0 or 1, found {sorted(bad)}")
    if require_both_classes and len(np.unique(codes)) < 2:
        raise DataError("training data must contain both classes")
    return codes


def check_dim(model_dim: int, X) -> None:
    if X.dim != model_dim:
        raise DataError(f"feature dimension {X.dim} does not match model dimension {model_dim}")


# kind tag -> class; populated by each model module at import time.
MODEL_KINDS: dict[str, type] = {}


def register_model(kind: str):
    def wrap(cls):
        cls.kind = kind
        MODEL_KINDS[kind] = cls
        return cls

    return wrap


def make_model(kind: str, params: dict[str, Any] | None = None, seed: int = 0):
    """Instantiate a classifier by kind tag with its pinned default params."""
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind {kind!r} (known: {', '.join(sorted(MODEL_KINDS))})")
    cls = MODEL_KINDS[kind]
    kwargs = dict(params or {})
    if cls.needs_seed:
        kwargs.setdefault("seed", seed)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for model {kind!r}: {exc}") from exc


def model_to_document(model) -> str:
    return dump_document("tweetinfo.model", {"kind": model.kind, **model.to_params()})


def model_from_document(text: str):
    doc = load_document(text, "tweetinfo.model")
    kind = doc.get("kind")
    if kind not in MODEL_KINDS:
        raise DataError(f"unknown model kind {kind!r} in document")
    return MODEL_KINDS[kind].from_params(doc)
