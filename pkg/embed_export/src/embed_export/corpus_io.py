"""Minimal reader for the shared-task TSV format.

``id<TAB>text`` or ``id<TAB>text<TAB>label`` per line, UTF-8, LF or CRLF.
Deliberately self-contained: this package consumes the classifier toolkit's
file interfaces, not its code.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

LABELS = {"INFORMATIVE": 1, "UNINFORMATIVE": 0}


@dataclass(frozen=True)
class Record:
    id: str
    text: str
    label: int | None = None  # 1 = INFORMATIVE


def read_tsv(path: str | Path, has_labels: bool) -> list[Record]:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    records: list[Record] = []
    seen: set[str] = set()
    expected = 3 if has_labels else 2
    for lineno, raw in enumerate(lines, start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        cols = line.split("\t")
        if len(cols) != expected:
            raise ValueError(f"line {lineno}: expected {expected} columns, found {len(cols)}")
        if not cols[0] or cols[0] in seen:
            raise ValueError(f"line {lineno}: missing or duplicate id {cols[0]!r}")
        seen.add(cols[0])
        label = None
        if has_labels:
            if cols[2] not in LABELS:
                raise ValueError(f"line {lineno}: unknown label {cols[2]!r}")
            label = LABELS[cols[2]]
        records.append(Record(id=cols[0], text=cols[1], label=label))
    return records
