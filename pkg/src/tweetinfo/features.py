"""N-gram count/TF-IDF featurization and engineered tweet features.

The TF-IDF weighting is pinned explicitly so the artifact is self-contained:
smoothed inverse document frequency ``idf_t = ln((1+N)/(1+df_t)) + 1`` with
raw in-document term counts and L2 document normalization.  No case folding
happens here; case is controlled solely by the lowercase cleaning stage, so
pipeline comparisons with and without forced lowercase stay meaningful.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DataError
from .preprocess import EmojiLexicon, load_emoji_lexicon, load_profanity
from .serialize import dump_document, load_document

_TOKEN_RE = re.compile(r"\w{2,}")

# Guard for materializing huge sparse matrices; ~1 GiB of float64.
_DENSE_CELL_LIMIT = 2**27


def tokenize_for_ngrams(text: str) -> list[str]:
    """Maximal runs of word characters (letters, digits, underscore), length >= 2.

    Single-character tokens ("I", "a", lone digits) are dropped; no case
    folding happens here.
    """
    return _TOKEN_RE.findall(text)


def extract_ngrams(tokens: list[str], ngram_range: tuple[int, int]) -> Counter:
    """Multiset of contiguous space-joined n-grams for each n in the range."""
    lo, hi = ngram_range
    if not (1 <= lo <= hi):
        raise ConfigError(f"bad ngram range {ngram_range}")
    grams: Counter = Counter()
    for n in range(lo, hi + 1):
        if n == 1:
            grams.update(tokens)
        else:
            for i in range(len(tokens) - n + 1):
                grams[" ".join(tokens[i : i + n])] += 1
    return grams


@dataclass(frozen=True)
class SparseVector:
    """Parallel (column index, value) arrays; indices strictly increasing."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must be parallel")
        if len(self.indices) and (np.diff(self.indices) <= 0).any():
            raise ValueError("indices must be strictly increasing")
        if (self.values == 0).any():
            raise ValueError("stored values must be non-zero")

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))


class FeatureMatrix:
    """Row-major feature matrix, sparse (CSR) or dense, uniform column count."""

    def __init__(self, data: sp.csr_matrix | np.ndarray):
        if sp.issparse(data):
            data = data.tocsr()
        else:
            data = np.asarray(data, dtype=np.float64)
            if data.ndim != 2:
                raise ValueError("dense feature matrices must be 2-D")
        self._data = data

    @classmethod
    def from_sparse_vectors(cls, vectors: list[SparseVector], dim: int | None = None) -> "FeatureMatrix":
        if dim is None:
            if not vectors:
                raise ValueError("cannot infer dimension from an empty row list")
            dim = vectors[0].dim
        indptr = [0]
        indices: list[np.ndarray] = []
        values: list[np.ndarray] = []
        for vec in vectors:
            if vec.dim != dim:
                raise DataError(f"row dimension {vec.dim} != matrix dimension {dim}")
            indices.append(vec.indices)
            values.append(vec.values)
            indptr.append(indptr[-1] + vec.nnz)
        csr = sp.csr_matrix(
            (
                np.concatenate(values) if values else np.empty(0),
                np.concatenate(indices) if indices else np.empty(0, dtype=np.int64),
                np.array(indptr),
            ),
            shape=(len(vectors), dim),
        )
        return cls(csr)

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self._data)

    @property
    def n_rows(self) -> int:
        return self._data.shape[0]

    @property
    def dim(self) -> int:
        return self._data.shape[1]

    def csr(self) -> sp.csr_matrix:
        return self._data if self.is_sparse else sp.csr_matrix(self._data)

    def dense(self, force: bool = False) -> np.ndarray:
        if not self.is_sparse:
            return self._data
        if not force and self.n_rows * self.dim > _DENSE_CELL_LIMIT:
            raise DataError(
                f"refusing to densify a {self.n_rows}x{self.dim} sparse matrix; "
                "use dense-friendly features or force=True"
            )
        return np.asarray(self._data.todense())

    def row(self, i: int) -> SparseVector:
        if self.is_sparse:
            sl = self._data[i]
            order = np.argsort(sl.indices)
            return SparseVector(sl.indices[order].astype(np.int64), sl.data[order], self.dim)
        dense_row = self._data[i]
        idx = np.flatnonzero(dense_row)
        return SparseVector(idx.astype(np.int64), dense_row[idx], self.dim)


@dataclass(frozen=True)
class Vocabulary:
    """N-gram string -> dense column index, in lexicographic n-gram order."""

    index: dict[str, int]
    ngram_range: tuple[int, int]

    def __len__(self) -> int:
        return len(self.index)

    def terms(self) -> list[str]:
        """Terms in column order (lexicographic)."""
        out = [""] * len(self.index)
        for term, col in self.index.items():
            out[col] = term
        return out

    @classmethod
    def build(cls, corpus: list[str], ngram_range: tuple[int, int]) -> "Vocabulary":
        seen: set[str] = set()
        for text in corpus:
            seen.update(extract_ngrams(tokenize_for_ngrams(text), ngram_range))
        return cls({term: i for i, term in enumerate(sorted(seen))}, ngram_range)


def _counts_vector(vocab: Vocabulary, text: str) -> SparseVector:
    grams = extract_ngrams(tokenize_for_ngrams(text), vocab.ngram_range)
    pairs = sorted(
        (col, float(count))
        for term, count in grams.items()
        if (col := vocab.index.get(term)) is not None
    )
    idx = np.array([p[0] for p in pairs], dtype=np.int64)
    val = np.array([p[1] for p in pairs])
    return SparseVector(idx, val, len(vocab))


def fit_counts(corpus: list[str], ngram_range: tuple[int, int] = (1, 1)) -> Vocabulary:
    """Fit a raw-count vocabulary (unigram-only by default)."""
    return Vocabulary.build(corpus, ngram_range)


def transform_counts(vocab: Vocabulary, text: str) -> SparseVector:
    """Occurrence counts per vocabulary column; out-of-vocabulary terms ignored."""
    return _counts_vector(vocab, text)


@dataclass(frozen=True)
class TfidfModel:
    """Fitted vocabulary plus smoothed idf weights.

    ``idf_t = ln((1+N)/(1+df_t)) + 1`` where N is the number of training
    documents and df_t the number containing term t; always >= 1.
    """

    vocab: Vocabulary
    idf: np.ndarray
    document_count: int


def fit_tfidf(corpus: list[str], ngram_range: tuple[int, int] = (1, 3)) -> TfidfModel:
    if not corpus:
        raise DataError("cannot fit TF-IDF on an empty corpus")
    vocab = Vocabulary.build(corpus, ngram_range)
    df = np.zeros(len(vocab))
    for text in corpus:
        grams = extract_ngrams(tokenize_for_ngrams(text), ngram_range)
        for term in grams:
            col = vocab.index.get(term)
            if col is not None:
                df[col] += 1
    n_docs = len(corpus)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    return TfidfModel(vocab=vocab, idf=idf, document_count=n_docs)


def transform_tfidf(model: TfidfModel, text: str) -> SparseVector:
    """tf * idf, L2-normalized (all-zero vectors stay all-zero)."""
    raw = _counts_vector(model.vocab, text)
    values = raw.values * model.idf[raw.indices]
    norm = math.sqrt(float(np.sum(values**2)))
    if norm > 0:
        values = values / norm
    return SparseVector(raw.indices, values, raw.dim)


# ---------------------------------------------------------------------------
# Engineered tweet features (computed on RAW text, before any cleaning —
# the op pipeline deletes every placeholder these features count).

TWEET_FEATURE_NAMES = (
    "url_count",
    "hash_count",
    "user_count",
    "emoji_count",
    "word_count",
    "syllable_count",
    "has_profanity",
)

_VOWELS = set("aeiouy")


@dataclass(frozen=True)
class TweetFeatures:
    url_count: int
    hash_count: int
    user_count: int
    emoji_count: int
    word_count: int
    syllable_count: int
    has_profanity: int

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in TWEET_FEATURE_NAMES], dtype=np.float64)


def syllables_in_word(word: str) -> int:
    """Heuristic syllable count for one whitespace token.

    Counts maximal vowel groups (aeiouy, case-insensitive), subtracts one for
    a terminal silent 'e' after a consonant in words longer than two scalars,
    floors at 1 for alphabetic words.  Non-alphabetic tokens contribute 0.
    """
    if not word or not word.isalpha():
        return 0
    lower = word.lower()
    groups = 0
    prev_vowel = False
    for ch in lower:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if len(lower) > 2 and lower.endswith("e") and lower[-2] not in _VOWELS:
        groups -= 1
    return max(groups, 1)


@lru_cache(maxsize=1)
def _default_emoji_lexicon() -> EmojiLexicon:
    return load_emoji_lexicon()


@lru_cache(maxsize=1)
def _default_profanity() -> frozenset[str]:
    return load_profanity()


def tweet_features(
    raw_text: str,
    emoji_lexicon: EmojiLexicon | None = None,
    profanity: frozenset[str] | None = None,
) -> TweetFeatures:
    """The seven engineered features of a raw (uncleaned) tweet."""
    lexicon = emoji_lexicon if emoji_lexicon is not None else _default_emoji_lexicon()
    bad_words = profanity if profanity is not None else _default_profanity()
    tokens = raw_text.split()
    return TweetFeatures(
        url_count=raw_text.count("HTTPURL"),
        hash_count=raw_text.count("#"),
        user_count=raw_text.count("@USER"),
        emoji_count=lexicon.count(raw_text),
        word_count=len(tokens),
        syllable_count=sum(syllables_in_word(tok) for tok in tokens),
        has_profanity=int(any(tok.lower() in bad_words for tok in tokens)),
    )


# ---------------------------------------------------------------------------
# Serialization

def tfidf_to_document(model: TfidfModel) -> str:
    terms = model.vocab.terms()
    return dump_document(
        "tweetinfo.model",
        {
            "kind": "tfidf_featurizer",
            "ngram_range": list(model.vocab.ngram_range),
            "document_count": model.document_count,
            "terms": terms,
            "idf": [float(x) for x in model.idf],
        },
    )


def tfidf_from_document(text: str) -> TfidfModel:
    doc = load_document(text, "tweetinfo.model")
    if doc.get("kind") != "tfidf_featurizer":
        raise DataError(f"expected a tfidf_featurizer document, got {doc.get('kind')!r}")
    terms = doc["terms"]
    vocab = Vocabulary({t: i for i, t in enumerate(terms)}, tuple(doc["ngram_range"]))
    return TfidfModel(vocab=vocab, idf=np.array(doc["idf"]), document_count=doc["document_count"])


def counts_to_document(vocab: Vocabulary) -> str:
    return dump_document(
        "tweetinfo.model",
        {
            "kind": "counts_featurizer",
            "ngram_range": list(vocab.ngram_range),
            "terms": vocab.terms(),
        },
    )


def counts_from_document(text: str) -> Vocabulary:
    doc = load_document(text, "tweetinfo.model")
    if doc.get("kind") != "counts_featurizer":
        raise DataError(f"expected a counts_featurizer document, got {doc.get('kind')!r}")
    return Vocabulary({t: i for i, t in enumerate(doc["terms"])}, tuple(doc["ngram_range"]))
