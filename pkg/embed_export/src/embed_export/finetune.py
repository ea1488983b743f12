"""Sequence-classification fine-tuning on the labeled tweets.

Optimizer is AdamW with the published settings: learning rate 2e-5,
beta1 0.9, beta2 0.999, epsilon 1e-8, decoupled weight decay.  Inputs are
padded/truncated to 128 tokens.  The epoch count is not pinned by the
published setup; the default of 3 is a guess and is recorded as such in the
export metadata.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import torch
from transformers import AutoModelForSequenceClassification

from .corpus_io import Record
from .exporter import ModelAssetsMissing

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class FineTuneConfig:
    learning_rate: float = 2e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.01
    max_length: int = 128
    epochs: int = 3
    batch_size: int = 8
    seed: int = 0

    def as_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "weight_decay": self.weight_decay,
            "max_length": self.max_length,
            "epochs": self.epochs,
            "epochs_note": "epoch count is a guess; not pinned by the published setup",
            "batch_size": self.batch_size,
            "seed": self.seed,
        }


def fine_tune(model_ref: str, tokenizer, records: list[Record], cfg: FineTuneConfig) -> torch.nn.Module:
    """Fine-tune a sequence classifier on labeled records; returns the base
    encoder (classification head dropped), ready for embedding extraction."""
    labeled = [r for r in records if r.label is not None]
    if len(labeled) < 2 or len({r.label for r in labeled}) < 2:
        raise ValueError("fine-tuning needs labeled records from both classes")
    torch.manual_seed(cfg.seed)
    try:
        model = AutoModelForSequenceClassification.from_pretrained(model_ref, num_labels=2)
    except (OSError, ValueError) as exc:
        raise ModelAssetsMissing(f"cannot load model weights for {model_ref!r}: {exc}") from exc
    model.train()
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=cfg.learning_rate,
        betas=(cfg.beta1, cfg.beta2),
        eps=cfg.epsilon,
        weight_decay=cfg.weight_decay,
    )
    generator = torch.Generator().manual_seed(cfg.seed)
    for epoch in range(cfg.epochs):
        order = torch.randperm(len(labeled), generator=generator).tolist()
        total_loss = 0.0
        for start in range(0, len(order), cfg.batch_size):
            chunk = [labeled[i] for i in order[start : start + cfg.batch_size]]
            enc = tokenizer(
                [r.text for r in chunk],
                padding="max_length",
                truncation=True,
                max_length=cfg.max_length,
                return_tensors="pt",
            )
            labels = torch.tensor([r.label for r in chunk], dtype=torch.long)
            optimizer.zero_grad()
            out = model(**enc, labels=labels)
            out.loss.backward()
            optimizer.step()
            total_loss += float(out.loss.detach())
        LOGGER.info("epoch %d/%d: mean loss %.4f", epoch + 1, cfg.epochs,
                    total_loss / max(1, (len(order) + cfg.batch_size - 1) // cfg.batch_size))
    base = getattr(model, model.base_model_prefix)
    base.eval()
    return base
