import os
from pathlib import Path

import pytest

from tweetinfo.corpus import Dataset, Label, LabeledTweet, Tweet

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# Real shared-task data is optional: point TWEETINFO_DATA at a directory
# holding train.tsv and valid.tsv to enable the dataset-conditional
# acceptance criteria.
DATA_DIR = os.environ.get("TWEETINFO_DATA")


def dataset_available() -> bool:
    if not DATA_DIR:
        return False
    base = Path(DATA_DIR)
    return (base / "train.tsv").is_file() and (base / "valid.tsv").is_file()


needs_dataset = pytest.mark.skipif(
    not dataset_available(),
    reason="set TWEETINFO_DATA to a directory with train.tsv and valid.tsv",
)


def make_dataset(rows: list[tuple[str, str, str | None]], name: str = "test") -> Dataset:
    records = tuple(
        LabeledTweet(Tweet(rid, text), Label(label) if label is not None else None)
        for rid, text, label in rows
    )
    return Dataset(records, name=name)


@pytest.fixture
def tiny_labeled(tmp_path) -> Path:
    """A small, cleanly separable labeled TSV."""
    rows = [
        "t01\tnew covid cases confirmed today HTTPURL\tINFORMATIVE",
        "t02\tdeaths rise as cases surge #covid\tINFORMATIVE",
        "t03\ttested positive for covid this morning\tINFORMATIVE",
        "t04\thealth officials report 120 new cases\tINFORMATIVE",
        "t05\tcovid deaths confirmed in the region\tINFORMATIVE",
        "t06\thospital reports new confirmed cases\tINFORMATIVE",
        "t07\tmiss my cat so much today\tUNINFORMATIVE",
        "t08\tlol this show is goooood \U0001F602\tUNINFORMATIVE",
        "t09\tcant wait for the weekend @USER\tUNINFORMATIVE",
        "t10\twhat a beautiful sunset tonight\tUNINFORMATIVE",
        "t11\tcoffee first then everything else\tUNINFORMATIVE",
        "t12\tnew haircut feeling great \U0001F600\tUNINFORMATIVE",
    ]
    path = tmp_path / "tiny.tsv"
    path.write_text("".join(r + "\n" for r in rows), encoding="utf-8")
    return path
