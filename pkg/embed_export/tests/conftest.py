from pathlib import Path

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "covid", "cases", "rise", "confirmed", "deaths", "tested", "positive",
    "stay", "home", "cat", "video", "lol", "new", "today", "the", "a",
    "##s", "##ing", "##ed", "httpurl", "@", "user", "#",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> str:
    """A small randomly initialized BERT saved locally (no network)."""
    out = tmp_path_factory.mktemp("tiny_bert")
    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
    )
    model = BertModel(config)
    model.save_pretrained(out)
    vocab_file = out / "vocab.txt"
    vocab_file.write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    tokenizer = BertTokenizer(str(vocab_file), do_lower_case=True)
    tokenizer.save_pretrained(out)
    return str(out)


@pytest.fixture
def labeled_tsv(tmp_path) -> Path:
    rows = [
        "t1\tnew covid cases confirmed today\tINFORMATIVE",
        "t2\tcovid deaths rise today\tINFORMATIVE",
        "t3\ttested positive today\tINFORMATIVE",
        "t4\tcat video lol\tUNINFORMATIVE",
        "t5\tstay home lol\tUNINFORMATIVE",
        "t6\tthe cat is a lol\tUNINFORMATIVE",
    ]
    path = tmp_path / "labeled.tsv"
    path.write_text("".join(r + "\n" for r in rows), encoding="utf-8")
    return path


@pytest.fixture
def unlabeled_tsv(tmp_path) -> Path:
    rows = [
        "u1\tcovid cases rise",
        "u2\tcat video",
        "u3\tstay home today",
        "u4\tnew deaths confirmed",
        "u5\tlol lol lol",
    ]
    path = tmp_path / "unlabeled.tsv"
    path.write_text("".join(r + "\n" for r in rows), encoding="utf-8")
    return path
