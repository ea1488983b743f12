import json
import shutil
import subprocess

import numpy as np
import pytest

from embed_export.cli import main as cli_main
from embed_export.corpus_io import read_tsv
from embed_export.emb_format import read_emb1, write_emb1


def run_cli(args) -> int:
    try:
        return cli_main(list(args)) or 0
    except SystemExit as exc:
        return int(exc.code or 0)


class TestEmbFormat:
    def test_write_read_round_trip(self, tmp_path):
        ids = ["a", "b"]
        matrix = np.array([[0.125, -3.5], [1e-7, 42.0]], dtype=np.float32)
        path = tmp_path / "x.emb1"
        write_emb1(ids, matrix, path)
        got_ids, got = read_emb1(path)
        assert got_ids == ids
        assert np.array_equal(got.astype(np.float32), matrix)
        assert path.read_text().startswith("#emb v1 dim=2\n")

    def test_reader_rejects_bad_header(self, tmp_path):
        bad = tmp_path / "bad.emb1"
        bad.write_text("dim=2\n")
        with pytest.raises(ValueError):
            read_emb1(bad)

    def test_writer_rejects_non_finite(self, tmp_path):
        with pytest.raises(ValueError):
            write_emb1(["a"], np.array([[np.nan]]), tmp_path / "n.emb1")


class TestCorpusIo:
    def test_read_labeled(self, labeled_tsv):
        records = read_tsv(labeled_tsv, has_labels=True)
        assert len(records) == 6
        assert records[0].id == "t1"
        assert records[0].label == 1
        assert records[3].label == 0

    def test_bad_column_count(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("x\tonly text\n")
        with pytest.raises(ValueError, match="line 1"):
            read_tsv(bad, has_labels=True)


class TestPretrainedExport:
    def test_exports_all_rows_in_order(self, tiny_model_dir, unlabeled_tsv, tmp_path):
        out = tmp_path / "out.emb1"
        code = run_cli(
            ["export", "--data", str(unlabeled_tsv), "--out", str(out), "--model", tiny_model_dir]
        )
        assert code == 0
        ids, matrix = read_emb1(out)
        assert ids == ["u1", "u2", "u3", "u4", "u5"]
        assert matrix.shape == (5, 32)  # tiny model hidden size
        meta = json.loads((tmp_path / "out.emb1.meta.json").read_text())
        assert meta["dim"] == 32 and meta["rows"] == 5

    def test_deterministic_repeat(self, tiny_model_dir, unlabeled_tsv, tmp_path):
        a = tmp_path / "a.emb1"
        b = tmp_path / "b.emb1"
        for out in (a, b):
            assert run_cli(
                ["export", "--data", str(unlabeled_tsv), "--out", str(out), "--model", tiny_model_dir]
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_truncation_warns_but_succeeds(self, tiny_model_dir, tmp_path, caplog):
        long_text = " ".join(["covid"] * 300)
        data = tmp_path / "long.tsv"
        data.write_text(f"L1\t{long_text}\n")
        out = tmp_path / "long.emb1"
        assert run_cli(
            ["export", "--data", str(data), "--out", str(out), "--model", tiny_model_dir,
             "--max-length", "16"]
        ) == 0
        ids, matrix = read_emb1(out)
        assert ids == ["L1"]

    def test_missing_model_assets_exit_2(self, unlabeled_tsv, tmp_path):
        code = run_cli(
            ["export", "--data", str(unlabeled_tsv), "--out", str(tmp_path / "x.emb1"),
             "--model", str(tmp_path / "no_such_model_dir")]
        )
        assert code == 2

    def test_malformed_tsv_exit_3(self, tiny_model_dir, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("one_column_only\n")
        code = run_cli(
            ["export", "--data", str(bad), "--out", str(tmp_path / "x.emb1"), "--model", tiny_model_dir]
        )
        assert code == 3


class TestFinetunedExport:
    def test_finetune_then_export(self, tiny_model_dir, labeled_tsv, tmp_path):
        out = tmp_path / "ft.emb1"
        code = run_cli(
            ["export", "--data", str(labeled_tsv), "--labeled", "--out", str(out),
             "--model", tiny_model_dir, "--mode", "finetuned", "--epochs", "1", "--batch-size", "3"]
        )
        assert code == 0
        ids, matrix = read_emb1(out)
        assert len(ids) == 6
        assert matrix.shape[1] == 32
        meta = json.loads((tmp_path / "ft.emb1.meta.json").read_text())
        assert meta["finetune"]["learning_rate"] == 2e-5
        assert meta["finetune"]["beta1"] == 0.9
        assert meta["finetune"]["beta2"] == 0.999
        assert meta["finetune"]["epsilon"] == 1e-8
        assert "guess" in meta["finetune"]["epochs_note"]

    def test_finetuned_mode_needs_labels(self, tiny_model_dir, unlabeled_tsv, tmp_path):
        code = run_cli(
            ["export", "--data", str(unlabeled_tsv), "--out", str(tmp_path / "x.emb1"),
             "--model", tiny_model_dir, "--mode", "finetuned"]
        )
        assert code == 2


@pytest.mark.skipif(shutil.which("tweetinfo") is None, reason="primary toolkit CLI not on PATH")
class TestPrimaryInterop:
    """The exported file must be consumable by the classifier toolkit's CLI."""

    def test_fuse_train_eval_accepts_export(self, tiny_model_dir, labeled_tsv, tmp_path):
        emb = tmp_path / "interop.emb1"
        assert run_cli(
            ["export", "--data", str(labeled_tsv), "--labeled", "--out", str(emb),
             "--model", tiny_model_dir]
        ) == 0
        model_path = tmp_path / "fusion.json"
        proc = subprocess.run(
            ["tweetinfo", "fuse-train", "--train", str(labeled_tsv), "--emb", str(emb),
             "--out", str(model_path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        metrics_path = tmp_path / "metrics.json"
        proc = subprocess.run(
            ["tweetinfo", "fuse-eval", "--model", str(model_path), "--eval", str(labeled_tsv),
             "--emb", str(emb), "--out", str(metrics_path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.startswith("F1 ")
        assert metrics_path.is_file()
