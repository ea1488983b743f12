"""Deterministic JSON documents for models, reports, and configs.

Every artifact the toolkit writes must be byte-identical across runs with the
same config fingerprint, so we emit JSON ourselves instead of relying on
``json.dumps`` float repr: floats are formatted with 17 significant digits
(enough for exact binary64 round-trip), keys are emitted in sorted order, and
strings are ASCII-escaped.  ``json.loads`` reads the documents back.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any

from .errors import DataError

# (document kind, version) pairs this build can read and write.
FORMAT_VERSIONS = {
    "tweetinfo.model": 1,
    "tweetinfo.report": 1,
    "tweetinfo.metrics": 1,
    "tweetinfo.pipeline": 1,
}


def format_float(x: float) -> str:
    """17-significant-digit decimal form; round-trips binary64 exactly.

    Always includes a decimal point or exponent so JSON readers parse the
    value as a float (keeps -0.0 signed and 1.0 typed as float).
    """
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value cannot be serialized: {x!r}")
    text = format(float(x), ".17g")
    if not any(c in text for c in ".eE"):
        text += ".0"
    return text


def _emit(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(format_float(obj))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(",")
            _emit(item, parts)
        parts.append("]")
    elif isinstance(obj, dict):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be str, got {type(key).__name__}")
            if i:
                parts.append(",")
            parts.append(json.dumps(key, ensure_ascii=True))
            parts.append(":")
            _emit(obj[key], parts)
        parts.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, 17-sig-digit floats, ASCII-only."""
    parts: list[str] = []
    _emit(obj, parts)
    return "".join(parts)


def dump_document(kind: str, body: dict[str, Any]) -> str:
    """Wrap ``body`` in a versioned envelope and serialize canonically."""
    if kind not in FORMAT_VERSIONS:
        raise ValueError(f"unknown document kind {kind!r}")
    doc = {"format": kind, "version": FORMAT_VERSIONS[kind], **body}
    return dumps(doc) + "\n"


def load_document(text: str, kind: str) -> dict[str, Any]:
    """Parse a versioned document, checking kind and version tags."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise DataError("document root must be a JSON object")
    if doc.get("format") != kind:
        raise DataError(f"expected document format {kind!r}, got {doc.get('format')!r}")
    if doc.get("version") != FORMAT_VERSIONS[kind]:
        raise DataError(
            f"unsupported {kind} version {doc.get('version')!r} "
            f"(this build reads version {FORMAT_VERSIONS[kind]})"
        )
    return doc


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def fingerprint(obj: Any) -> str:
    """Stable hex digest of any canonically-serializable object."""
    return sha256_hex(dumps(obj).encode("ascii"))
