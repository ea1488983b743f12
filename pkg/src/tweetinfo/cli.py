"""Command-line experiment runner.

Exit codes: 0 success, 2 configuration error, 3 data error.  Every output
artifact embeds (inline for JSON, via a ``<name>.meta.json`` sidecar for
TSV) the full run-config fingerprint and resource-file checksums; two runs
with equal fingerprints produce byte-identical outputs.

All randomness flows from ``--seed``: the fold plan uses it directly, the
dummy baseline uses it as its draw seed, and forest trees use
``seed XOR tree_index``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import click

from . import __version__
from .bundle import bundle_predict, load_bundle, save_bundle, train_bundle
from .corpus import Dataset, Label, LabeledTweet, Tweet, load_tsv, save_tsv, stratified_folds
from .errors import ConfigError, DataError
from .evaluation import (
    FeaturizerConfig,
    ModelConfig,
    cross_validate,
    report_text_table,
    top_weights,
)
from .fusion import (
    FusionConfig,
    eval_fusion,
    fusion_from_document,
    fusion_to_document,
    load_embeddings,
    train_fusion,
)
from .models import MODEL_KINDS
from .models.logreg import LogisticRegression
from .preprocess import apply_pipeline_batch, parse_pipeline_spec, _resource_path
from .serialize import dump_document, dumps, fingerprint, sha256_hex

_RESOURCE_FILES = ("stopwords.txt", "lemma_exceptions.tsv", "emoji_names.tsv", "profanity.txt")


def resource_checksums() -> dict[str, str]:
    return {name: sha256_hex(_resource_path(name).read_bytes()) for name in _RESOURCE_FILES}


def run_fingerprint(command: str, params: dict[str, Any]) -> tuple[str, dict[str, Any]]:
    config = {
        "command": command,
        "params": params,
        "resources": resource_checksums(),
        "toolkit_version": __version__,
    }
    return fingerprint(config), config


def _load_config_file(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        loaded = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError("config file must hold a JSON object")
    return loaded


def _merge(flag_value, config: dict[str, Any], key: str, default=None):
    """Flags override config-file entries, which override defaults."""
    if flag_value is not None:
        return flag_value
    return config.get(key, default)


def _write_sidecar(out_path: Path, fp: str, config: dict[str, Any]) -> None:
    sidecar = out_path.with_name(out_path.name + ".meta.json")
    sidecar.write_text(dumps({"fingerprint": fp, "config": config}) + "\n", encoding="utf-8")


def _model_config(kind: str, params: dict[str, Any] | None, seed: int) -> ModelConfig:
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model {kind!r} (known: {', '.join(sorted(MODEL_KINDS))})")
    return ModelConfig(kind=kind, params=params, seed=seed)


@click.group()
@click.version_option(version=__version__)
def cli():
    """Tweet informativeness experiments: clean, featurize, train, evaluate."""


@cli.command()
@click.option("--in", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--pipeline", default="op", show_default=True, help="Pipeline name or comma-separated stage list.")
@click.option("--no-labels", is_flag=True, help="Input TSV has no label column.")
@click.option("--header", is_flag=True, help="Skip one header line in the input.")
@click.option("--jobs", default=1, show_default=True)
def clean(input_path, output_path, pipeline, no_labels, header, jobs):
    """Clean the text column of a TSV; ids and labels pass through untouched."""
    pipeline_cfg = parse_pipeline_spec(pipeline)
    ds = load_tsv(input_path, has_labels=not no_labels, skip_header=header)
    cleaned = apply_pipeline_batch(pipeline_cfg, ds.texts, jobs=jobs)
    out_records = [
        LabeledTweet(tweet=Tweet(rec.tweet.id, text), label=rec.label)
        for rec, text in zip(ds.records, cleaned)
    ]
    out_path = Path(output_path)
    save_tsv(Dataset(tuple(out_records), name=ds.name), out_path)
    fp, config = run_fingerprint("clean", {"pipeline": pipeline_cfg.stage_names(), "no_labels": no_labels})
    _write_sidecar(out_path, fp, config)


def _load_train_valid(train_path: str, valid_path: str | None) -> Dataset:
    ds = load_tsv(train_path)
    if valid_path is None:
        return ds
    valid = load_tsv(valid_path)
    overlap = set(ds.ids) & set(valid.ids)
    if overlap:
        raise DataError(f"duplicate ids across train/valid: {sorted(overlap)[:5]}")
    return Dataset(ds.records + valid.records, name="train+valid")


@cli.command()
@click.option("--train", "train_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--valid", "valid_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Optional second labeled TSV, concatenated with --train.")
@click.option("--pipeline", default=None)
@click.option("--features", "features_kind", default=None, type=click.Choice(["counts", "tfidf"]))
@click.option("--model", "model_kind", default=None)
@click.option("--k", default=None, type=int)
@click.option("--seed", default=None, type=int)
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@click.option("--jobs", default=1, show_default=True)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="JSON config file; explicit flags override its entries.")
def cv(train_path, valid_path, pipeline, features_kind, model_kind, k, seed, out_dir, jobs, config_path):
    """Stratified k-fold cross validation; writes report.json and report.txt."""
    file_cfg = _load_config_file(config_path)
    train_path = _merge(train_path, file_cfg, "train")
    if train_path is None:
        raise ConfigError("--train is required (flag or config file)")
    valid_path = _merge(valid_path, file_cfg, "valid")
    pipeline = _merge(pipeline, file_cfg, "pipeline", "op")
    features_kind = _merge(features_kind, file_cfg, "features", "tfidf")
    model_kind = _merge(model_kind, file_cfg, "model", "logreg")
    model_params = file_cfg.get("model_params")
    k = _merge(k, file_cfg, "k", 8)
    seed = _merge(seed, file_cfg, "seed", 0)
    out_dir = _merge(out_dir, file_cfg, "out")

    pipeline_cfg = parse_pipeline_spec(pipeline)
    feat_cfg = FeaturizerConfig(kind=features_kind)
    model_cfg = _model_config(model_kind, model_params, seed)
    ds = _load_train_valid(train_path, valid_path)
    plan = stratified_folds(ds, k=k, seed=seed)
    report = cross_validate(ds, plan, pipeline_cfg, feat_cfg, model_cfg, jobs=jobs)

    fp, config = run_fingerprint("cv", {**report.config, "dataset": ds.name, "n_records": len(ds)})
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        body = {"report": report.as_dict(), "fingerprint": fp, "run_config": config}
        (out / "report.json").write_text(dump_document("tweetinfo.report", body), encoding="utf-8")
        title = f"{k}-fold cross validation: model={model_kind} features={features_kind} pipeline={pipeline}"
        text = report_text_table(report, title) + f"\nfingerprint: {fp}\n"
        (out / "report.txt").write_text(text, encoding="utf-8")
    click.echo(f"mean F1 {report.mean_f1:.4f}")


@cli.command()
@click.option("--train", "train_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pipeline", default="op", show_default=True)
@click.option("--features", "features_kind", default="tfidf", type=click.Choice(["counts", "tfidf"]), show_default=True)
@click.option("--model", "model_kind", default="logreg", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--jobs", default=1, show_default=True)
def train(train_path, pipeline, features_kind, model_kind, seed, out_path, jobs):
    """Fit pipeline+featurizer+model on a labeled TSV and save the bundle."""
    pipeline_cfg = parse_pipeline_spec(pipeline)
    feat_cfg = FeaturizerConfig(kind=features_kind)
    model_cfg = _model_config(model_kind, None, seed)
    ds = load_tsv(train_path)
    fp, config = run_fingerprint(
        "train",
        {
            "pipeline": pipeline_cfg.stage_names(),
            "featurizer": feat_cfg.as_dict(),
            "model": model_cfg.as_dict(),
            "dataset": ds.name,
            "n_records": len(ds),
        },
    )
    bundle = train_bundle(ds, pipeline_cfg, feat_cfg, model_cfg, config={**config, "fingerprint": fp}, jobs=jobs)
    save_bundle(bundle, out_path)
    click.echo(f"saved {model_kind} bundle to {out_path}")


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--in", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--labeled", is_flag=True, help="Input TSV carries a label column (ignored for prediction).")
@click.option("--header", is_flag=True)
@click.option("--jobs", default=1, show_default=True)
def predict(model_path, input_path, output_path, labeled, header, jobs):
    """Predict labels for a TSV; writes ``id<TAB>label`` rows."""
    bundle = load_bundle(model_path)
    ds = load_tsv(input_path, has_labels=labeled, skip_header=header)
    codes = bundle_predict(bundle, ds, jobs=jobs)
    out_path = Path(output_path)
    lines = [
        f"{rec.tweet.id}\t{(Label.INFORMATIVE if c == 1 else Label.UNINFORMATIVE).value}"
        for rec, c in zip(ds.records, codes)
    ]
    out_path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    fp, config = run_fingerprint(
        "predict", {"bundle_fingerprint": bundle.config.get("fingerprint"), "n_records": len(ds)}
    )
    _write_sidecar(out_path, fp, config)


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--n", default=10, show_default=True)
def weights(model_path, n):
    """Print the top-n logistic-regression features by |weight|."""
    bundle = load_bundle(model_path)
    if not isinstance(bundle.model, LogisticRegression):
        raise ConfigError("weights requires a logreg bundle")
    for term, weight in top_weights(bundle.model, bundle.featurizer.vocab, n):
        click.echo(f"{term}\t{weight:.4f}")


@cli.command(name="fuse-train")
@click.option("--train", "train_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--emb", "emb_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--standardize", is_flag=True, help="Z-score the engineered slots with training statistics (deviation from the published setup).")
@click.option("--svm-c", "svm_c", default=1.0, show_default=True)
@click.option("--svm-tol", "svm_tol", default=1e-3, show_default=True)
def fuse_train(train_path, emb_path, out_path, standardize, svm_c, svm_tol):
    """Train the embedding-fusion SVM from a labeled TSV and an EMB1 file."""
    ds = load_tsv(train_path)
    table = load_embeddings(emb_path)
    cfg = FusionConfig(standardize_engineered=standardize, C=svm_c, tol=svm_tol)
    model = train_fusion(table, ds, cfg)
    fp, config = run_fingerprint(
        "fuse-train",
        {"fusion": cfg.as_dict(), "embedding_dim": table.dim, "dataset": ds.name, "n_records": len(ds)},
    )
    Path(out_path).write_text(fusion_to_document(model, config={**config, "fingerprint": fp}), encoding="utf-8")
    click.echo(f"saved fusion model to {out_path}")


@cli.command(name="fuse-eval")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--eval", "eval_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--emb", "emb_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
def fuse_eval(model_path, eval_path, emb_path, out_path):
    """Evaluate a fusion model on a labeled TSV; prints F1."""
    model = fusion_from_document(Path(model_path).read_text(encoding="utf-8"))
    ds = load_tsv(eval_path)
    table = load_embeddings(emb_path)
    result = eval_fusion(model, table, ds)
    if out_path is not None:
        fp, config = run_fingerprint(
            "fuse-eval",
            {"model_fingerprint": model_fingerprint_of(model_path), "dataset": ds.name, "n_records": len(ds)},
        )
        body = {
            **result.metrics.as_dict(),
            "macro_f1": result.macro_f1,
            "confusion": {
                "tp": result.confusion.tp,
                "fp": result.confusion.fp,
                "fn": result.confusion.fn,
                "tn": result.confusion.tn,
            },
            "n_eval": result.n_eval,
            "fingerprint": fp,
            "run_config": config,
        }
        Path(out_path).write_text(dump_document("tweetinfo.metrics", body), encoding="utf-8")
    click.echo(f"F1 {result.metrics.f1:.4f}")


def model_fingerprint_of(model_path: str) -> str | None:
    try:
        doc = json.loads(Path(model_path).read_text(encoding="utf-8"))
        return doc.get("config", {}).get("fingerprint")
    except (OSError, json.JSONDecodeError):
        return None


def main(argv=None) -> int:
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
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        raise SystemExit(2)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        raise SystemExit(3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
