"""Command-line exporter: TSV in, EMB1 out.

Exit codes: 0 success, 2 configuration/model-asset errors, 3 data errors.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .corpus_io import read_tsv
from .emb_format import read_emb1, write_emb1
from .exporter import ExportConfig, ModelAssetsMissing, extract_embeddings, load_encoder, load_tokenizer
from .finetune import FineTuneConfig, fine_tune


@click.group()
@click.version_option(version=__version__)
def cli():
    """Export tweet sentence embeddings to the EMB1 format."""


@cli.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="TSV of tweets to embed.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["pretrained", "finetuned"]), default="pretrained", show_default=True)
@click.option("--model", "model_ref", default="bert-large-uncased", show_default=True,
              help="Hugging Face model id or local model directory.")
@click.option("--labeled", is_flag=True, help="--data carries a label column.")
@click.option("--train-labels", "train_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Labeled TSV for fine-tuning (finetuned mode; defaults to --data when it is labeled).")
@click.option("--max-length", default=128, show_default=True)
@click.option("--batch-size", default=8, show_default=True)
@click.option("--epochs", default=3, show_default=True, help="Fine-tuning epochs (unpinned guess).")
@click.option("--seed", default=0, show_default=True)
def export(data_path, out_path, mode, model_ref, labeled, train_path, max_length, batch_size, epochs, seed):
    """Embed every tweet in --data and write an EMB1 file."""
    records = read_tsv(data_path, has_labels=labeled)
    tokenizer = load_tokenizer(model_ref)
    finetune_cfg = None
    if mode == "finetuned":
        if train_path is not None:
            train_records = read_tsv(train_path, has_labels=True)
        elif labeled:
            train_records = records
        else:
            raise click.UsageError("finetuned mode needs --train-labels or a labeled --data")
        finetune_cfg = FineTuneConfig(
            max_length=max_length, epochs=epochs, batch_size=batch_size, seed=seed
        )
        encoder = fine_tune(model_ref, tokenizer, train_records, finetune_cfg)
    else:
        encoder = load_encoder(model_ref)

    cfg = ExportConfig(model=model_ref, max_length=max_length, batch_size=batch_size, seed=seed)
    matrix = extract_embeddings(encoder, tokenizer, records, cfg)
    ids = [r.id for r in records]
    write_emb1(ids, matrix, out_path)

    # self-validation: the file must parse cleanly with every id in order
    parsed_ids, parsed = read_emb1(out_path)
    if parsed_ids != ids or parsed.shape[0] != len(records):
        Path(out_path).unlink(missing_ok=True)
        raise ValueError(f"row-count mismatch after export: wrote {parsed.shape[0]}, expected {len(records)}")

    meta = {
        "mode": mode,
        "model": model_ref,
        "dim": int(matrix.shape[1]),
        "rows": len(ids),
        "max_length": max_length,
        "seed": seed,
    }
    if finetune_cfg is not None:
        meta["finetune"] = finetune_cfg.as_dict()
    Path(out_path + ".meta.json").write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(ids)} embeddings (dim={matrix.shape[1]}) to {out_path}")


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        raise SystemExit(1)
    except click.exceptions.Exit as exc:
        raise SystemExit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        raise SystemExit(2)
    except click.ClickException as exc:
        exc.show()
        raise SystemExit(exc.exit_code)
    except ModelAssetsMissing as exc:
        click.echo(f"model assets missing: {exc}", err=True)
        raise SystemExit(2)
    except ValueError as exc:
        click.echo(f"data error: {exc}", err=True)
        raise SystemExit(3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
