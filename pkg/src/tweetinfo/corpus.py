"""Dataset loading, validation, and stratified fold planning.

The on-disk format is header-less UTF-8 TSV, one record per line:
``id<TAB>text<TAB>label`` (label column absent for unlabeled data).  The
distribution guarantees text never contains literal tabs, so a plain split
is a complete parser.  LF and CRLF inputs are both accepted; LF is emitted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError


class Label(enum.Enum):
    INFORMATIVE = "INFORMATIVE"
    UNINFORMATIVE = "UNINFORMATIVE"

    @classmethod
    def parse(cls, value: str, line: int | None = None) -> "Label":
        try:
            return cls(value)
        except ValueError:
            raise DataError(f"unknown label {value!r}", line=line) from None


@dataclass(frozen=True)
class Tweet:
    """A raw tweet; ``text`` is preserved byte-for-byte from the input file."""

    id: str
    text: str


@dataclass(frozen=True)
class LabeledTweet:
    tweet: Tweet
    label: Label | None = None


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of records with unique ids; order equals file order."""

    records: tuple[LabeledTweet, ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.tweet.id for r in self.records]

    @property
    def texts(self) -> list[str]:
        return [r.tweet.text for r in self.records]

    def labels(self) -> list[Label]:
        """Labels of all records; raises if any record is unlabeled."""
        out = []
        for r in self.records:
            if r.label is None:
                raise DataError(f"record {r.tweet.id!r} has no label")
            out.append(r.label)
        return out

    def label_codes(self) -> np.ndarray:
        """Labels as int8 codes, 1 = INFORMATIVE, 0 = UNINFORMATIVE."""
        return np.array([1 if lab is Label.INFORMATIVE else 0 for lab in self.labels()], dtype=np.int8)


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every record to one of ``k`` folds.

    Built by :func:`stratified_folds`; deterministic given (dataset, k, seed).
    """

    k: int
    seed: int
    assignment: tuple[int, ...]

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.array(self.assignment) == fold)

    def rest_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.array(self.assignment) != fold)


def _split_lines(raw: str) -> list[str]:
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def load_tsv(
    path: str | Path,
    has_labels: bool = True,
    skip_header: bool = False,
    name: str | None = None,
) -> Dataset:
    """Load a dataset from TSV.

    Raises :class:`DataError` (with line number) on wrong column counts,
    duplicate ids, or unknown label strings.
    """
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    if raw.startswith("﻿"):
        raw = raw[1:]
    expected_cols = 3 if has_labels else 2
    records: list[LabeledTweet] = []
    seen: set[str] = set()
    lines = _split_lines(raw)
    start = 1 if skip_header else 0
    for lineno, line in enumerate(lines[start:], start=start + 1):
        cols = line.split("\t")
        if len(cols) != expected_cols:
            raise DataError(
                f"expected {expected_cols} tab-separated columns, found {len(cols)}",
                line=lineno,
            )
        tweet_id = cols[0]
        if not tweet_id:
            raise DataError("empty tweet id", line=lineno)
        if tweet_id in seen:
            raise DataError(f"duplicate tweet id {tweet_id!r}", line=lineno)
        seen.add(tweet_id)
        label = Label.parse(cols[2], line=lineno) if has_labels else None
        records.append(LabeledTweet(Tweet(tweet_id, cols[1]), label))
    return Dataset(tuple(records), name=name if name is not None else path.name)


def save_tsv(ds: Dataset, path: str | Path) -> None:
    """Write a dataset back to TSV (LF line endings); inverse of :func:`load_tsv`."""
    lines = []
    for rec in ds.records:
        if rec.label is not None:
            lines.append(f"{rec.tweet.id}\t{rec.tweet.text}\t{rec.label.value}")
        else:
            lines.append(f"{rec.tweet.id}\t{rec.tweet.text}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def stratified_folds(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Plan a stratified k-fold split.

    Records are grouped by class in file order, each group is shuffled with a
    PCG64 generator seeded from ``seed``, and the shuffled groups are dealt
    round-robin into folds, so per-fold class counts differ by at most one.
    The class groups are consumed in label-name order (INFORMATIVE first),
    drawing from a single generator, which pins the plan for a given
    (dataset, k, seed) on every platform.
    """
    labels = ds.labels()
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    by_class: dict[Label, list[int]] = {}
    for idx, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(idx)
    min_class = min(len(v) for v in by_class.values())
    if k > min_class:
        raise ConfigError(f"k={k} exceeds the smallest class count ({min_class})")
    rng = np.random.Generator(np.random.PCG64(seed))
    assignment = [0] * len(ds)
    for lab in sorted(by_class, key=lambda l: l.value):
        group = np.array(by_class[lab])
        rng.shuffle(group)
        for pos, record_idx in enumerate(group):
            assignment[record_idx] = pos % k
    return FoldPlan(k=k, seed=seed, assignment=tuple(assignment))


def class_prevalence(ds: Dataset) -> float:
    """Fraction of records labeled INFORMATIVE."""
    labels = ds.labels()
    if not labels:
        raise DataError("cannot compute prevalence of an empty dataset")
    return sum(1 for lab in labels if lab is Label.INFORMATIVE) / len(labels)
