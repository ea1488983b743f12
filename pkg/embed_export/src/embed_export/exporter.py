"""Sentence-embedding extraction from a BERT encoder.

Every tweet is tokenized to exactly ``max_length`` (128 by default) tokens:
a leading classifier token, the text, a trailing separator, and zero-id
padding; over-length texts truncate with a warning.  The exported vector is
the final encoder layer's hidden state at the classifier position, i.e. the
sequence representation immediately before any classification head.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .corpus_io import Record

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExportConfig:
    model: str = "bert-large-uncased"
    max_length: int = 128
    batch_size: int = 8
    seed: int = 0


class ModelAssetsMissing(RuntimeError):
    """The model id/path could not be resolved to local weights."""


def load_tokenizer(model_ref: str):
    try:
        return AutoTokenizer.from_pretrained(model_ref)
    except (OSError, ValueError) as exc:
        raise ModelAssetsMissing(f"cannot load tokenizer for {model_ref!r}: {exc}") from exc


def load_encoder(model_ref: str) -> torch.nn.Module:
    try:
        encoder = AutoModel.from_pretrained(model_ref)
    except (OSError, ValueError) as exc:
        raise ModelAssetsMissing(f"cannot load model weights for {model_ref!r}: {exc}") from exc
    encoder.eval()
    return encoder


def count_truncated(tokenizer, texts: list[str], max_length: int) -> int:
    budget = max_length - 2  # classifier + separator tokens
    n = 0
    for text in texts:
        if len(tokenizer(text, add_special_tokens=False)["input_ids"]) > budget:
            n += 1
    return n


@torch.no_grad()
def extract_embeddings(
    encoder: torch.nn.Module,
    tokenizer,
    records: list[Record],
    cfg: ExportConfig,
) -> np.ndarray:
    """Final-layer classifier-token states, one row per record, input order."""
    encoder.eval()
    truncated = count_truncated(tokenizer, [r.text for r in records], cfg.max_length)
    if truncated:
        LOGGER.warning("%d of %d records exceed %d tokens and were truncated",
                       truncated, len(records), cfg.max_length)
    rows = []
    for start in range(0, len(records), cfg.batch_size):
        batch = [r.text for r in records[start : start + cfg.batch_size]]
        enc = tokenizer(
            batch,
            padding="max_length",
            truncation=True,
            max_length=cfg.max_length,
            return_tensors="pt",
        )
        out = encoder(**enc)
        rows.append(out.last_hidden_state[:, 0, :].to(torch.float32).cpu().numpy())
    if not rows:
        hidden = encoder.config.hidden_size
        return np.zeros((0, hidden), dtype=np.float32)
    return np.vstack(rows)
