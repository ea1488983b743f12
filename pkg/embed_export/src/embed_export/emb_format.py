"""EMB1 writer (and a strict reader used for self-validation).

Format: line 1 is exactly ``#emb v1 dim=<D>``; every following non-empty
line is ``<tweet_id><TAB><D space-separated floats>``.  UTF-8, LF endings.
Values are written with 9 significant digits, enough to round-trip float32
embeddings exactly.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

_HEADER_RE = re.compile(r"^#emb v1 dim=(\d+)$")


def write_emb1(ids: list[str], matrix: np.ndarray, path: str | Path) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != len(ids):
        raise ValueError("matrix must be 2-D with one row per id")
    if not np.isfinite(matrix).all():
        raise ValueError("embeddings contain non-finite values")
    lines = [f"#emb v1 dim={matrix.shape[1]}"]
    for tweet_id, row in zip(ids, matrix):
        lines.append(tweet_id + "\t" + " ".join(format(v, ".9g") for v in row))
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_emb1(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Strict parse, mirroring the consumer's contract; raises ValueError."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or (m := _HEADER_RE.match(lines[0])) is None:
        raise ValueError("missing or malformed EMB1 header")
    dim = int(m.group(1))
    ids: list[str] = []
    rows: list[np.ndarray] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"line {lineno}: expected id<TAB>floats")
        values = np.array([float(p) for p in cols[1].split()])
        if len(values) != dim:
            raise ValueError(f"line {lineno}: expected {dim} values, found {len(values)}")
        if not np.isfinite(values).all():
            raise ValueError(f"line {lineno}: non-finite value")
        if cols[0] in ids:
            raise ValueError(f"line {lineno}: duplicate id {cols[0]!r}")
        ids.append(cols[0])
        rows.append(values)
    return ids, np.vstack(rows) if rows else np.zeros((0, dim))
