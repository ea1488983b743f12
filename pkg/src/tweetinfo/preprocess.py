"""Composable tweet-cleaning stages.

Each stage is a pure text -> text function.  Stage output is always
whitespace-normalized: runs of whitespace collapse to a single space and the
result is trimmed, so downstream stages and featurizers never see stray
spacing left behind by deletions.

The "op" pipeline (the best-performing cleaning configuration) is:
placeholder-token removal (@USER, HTTPURL), hash-character removal,
emoji-to-word conversion, then repeated-character compression.  Emoji
conversion runs before compression so compression operates on the final
word text.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path

from joblib import Parallel, delayed

from .errors import ConfigError, DataError

USER_TOKEN = "@USER"
URL_TOKEN = "HTTPURL"


class Stage(enum.Enum):
    REMOVE_USER_TOKENS = "remove_user_tokens"
    REMOVE_URL_TOKENS = "remove_url_tokens"
    REMOVE_HASH_CHAR = "remove_hash_char"
    COMPRESS_REPEATS = "compress_repeats"
    EMOJI_TO_WORDS = "emoji_to_words"
    REMOVE_NON_ALNUM = "remove_non_alnum"
    REMOVE_STOPWORDS = "remove_stopwords"
    LEMMATIZE = "lemmatize"
    LOWERCASE = "lowercase"

    @classmethod
    def parse(cls, name: str) -> "Stage":
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(s.value for s in cls)
            raise ConfigError(f"unknown stage {name!r} (known: {known})") from None


# ---------------------------------------------------------------------------
# Bundled resources

def _resource_path(filename: str) -> Path:
    return Path(str(importlib_resources.files("tweetinfo").joinpath("resources", filename)))


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """One lowercase word per line; blank lines ignored."""
    path = Path(path) if path is not None else _resource_path("stopwords.txt")
    words = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        word = line.strip()
        if not word:
            continue
        if word != word.lower() or any(c.isspace() for c in word):
            raise DataError(f"stopword entry {word!r} must be lowercase with no whitespace", line=lineno)
        words.add(word)
    return frozenset(words)


def load_lemma_exceptions(path: str | Path | None = None) -> dict[str, str]:
    """Tab-separated ``surface<TAB>lemma`` pairs."""
    path = Path(path) if path is not None else _resource_path("lemma_exceptions.tsv")
    table = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0] or not cols[1]:
            raise DataError("lemma exception rows need exactly two non-empty columns", line=lineno)
        table[cols[0]] = cols[1]
    return table


class EmojiLexicon:
    """Map from emoji codepoint sequence to lowercase name words.

    Matching is leftmost, longest-sequence-first, so multi-scalar entries
    (base + variation selector) win over their base scalar.
    """

    def __init__(self, table: dict[str, str]):
        for seq, words in table.items():
            if not seq:
                raise DataError("empty emoji sequence key")
            if not words or not all(c == " " or ("a" <= c <= "z") for c in words):
                raise DataError(f"emoji name {words!r} must be ASCII letters and spaces")
        self._table = dict(table)
        self._by_first: dict[str, list[str]] = {}
        for seq in self._table:
            self._by_first.setdefault(seq[0], []).append(seq)
        for seqs in self._by_first.values():
            seqs.sort(key=len, reverse=True)

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, seq: str) -> bool:
        return seq in self._table

    def words_for(self, seq: str) -> str:
        return self._table[seq]

    def _match_at(self, text: str, i: int) -> str | None:
        for seq in self._by_first.get(text[i], ()):
            if text.startswith(seq, i):
                return seq
        return None

    def replace(self, text: str) -> str:
        """Replace every matching sequence with its space-delimited name words."""
        out: list[str] = []
        i = 0
        while i < len(text):
            seq = self._match_at(text, i)
            if seq is None:
                out.append(text[i])
                i += 1
            else:
                out.append(f" {self._table[seq]} ")
                i += len(seq)
        return "".join(out)

    def count(self, text: str) -> int:
        """Number of non-overlapping matching sequences."""
        n = 0
        i = 0
        while i < len(text):
            seq = self._match_at(text, i)
            if seq is None:
                i += 1
            else:
                n += 1
                i += len(seq)
        return n


def load_emoji_lexicon(path: str | Path | None = None) -> EmojiLexicon:
    """Rows of ``hex codepoints space-separated<TAB>name words``."""
    path = Path(path) if path is not None else _resource_path("emoji_names.tsv")
    table = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise DataError("emoji lexicon rows need exactly two columns", line=lineno)
        try:
            seq = "".join(chr(int(cp, 16)) for cp in cols[0].split())
        except ValueError:
            raise DataError(f"bad codepoint field {cols[0]!r}", line=lineno) from None
        table[seq] = cols[1]
    return EmojiLexicon(table)


def load_profanity(path: str | Path | None = None) -> frozenset[str]:
    path = Path(path) if path is not None else _resource_path("profanity.txt")
    return frozenset(w.strip() for w in path.read_text(encoding="utf-8").splitlines() if w.strip())


# ---------------------------------------------------------------------------
# Pipeline configuration

_OP_STAGES = (
    Stage.REMOVE_USER_TOKENS,
    Stage.REMOVE_URL_TOKENS,
    Stage.REMOVE_HASH_CHAR,
    Stage.EMOJI_TO_WORDS,
    Stage.COMPRESS_REPEATS,
)

NAMED_PIPELINES: dict[str, tuple[Stage, ...]] = {
    "none": (),
    "op": _OP_STAGES,
    "op_stopwords": _OP_STAGES + (Stage.REMOVE_STOPWORDS,),
    "op_alnum": _OP_STAGES + (Stage.REMOVE_NON_ALNUM,),
    "op_lower": _OP_STAGES + (Stage.LOWERCASE,),
    "op_lemma": _OP_STAGES + (Stage.LEMMATIZE,),
}


@dataclass(frozen=True)
class PipelineConfig:
    """An ordered stage list plus the resources the stages draw on.

    Immutable after construction; safe to share across threads.
    """

    stages: tuple[Stage, ...]
    stopwords: frozenset[str] = field(repr=False, default_factory=frozenset)
    lemma_exceptions: dict = field(repr=False, default_factory=dict)
    emoji_lexicon: EmojiLexicon = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if len(set(self.stages)) != len(self.stages):
            raise ConfigError("duplicate stages in pipeline")
        if self.emoji_lexicon is None:
            object.__setattr__(self, "emoji_lexicon", load_emoji_lexicon())
        if Stage.REMOVE_STOPWORDS in self.stages and not self.stopwords:
            object.__setattr__(self, "stopwords", load_stopwords())
        if Stage.LEMMATIZE in self.stages and not self.lemma_exceptions:
            object.__setattr__(self, "lemma_exceptions", load_lemma_exceptions())

    @classmethod
    def named(cls, name: str) -> "PipelineConfig":
        if name not in NAMED_PIPELINES:
            known = ", ".join(sorted(NAMED_PIPELINES))
            raise ConfigError(f"unknown pipeline {name!r} (known: {known})")
        return cls(stages=NAMED_PIPELINES[name])

    @classmethod
    def from_stage_names(cls, names: list[str]) -> "PipelineConfig":
        return cls(stages=tuple(Stage.parse(n) for n in names))

    def stage_names(self) -> list[str]:
        return [s.value for s in self.stages]


def parse_pipeline_spec(spec: str) -> PipelineConfig:
    """Accept either a named pipeline or a comma-separated stage list."""
    if spec in NAMED_PIPELINES:
        return PipelineConfig.named(spec)
    return PipelineConfig.from_stage_names([p.strip() for p in spec.split(",") if p.strip()])


def pipeline_to_document(cfg: PipelineConfig) -> str:
    """Serialize a pipeline as a versioned JSON document of stage names."""
    from .serialize import dump_document

    return dump_document("tweetinfo.pipeline", {"stages": cfg.stage_names()})


def pipeline_from_document(text: str) -> PipelineConfig:
    from .serialize import load_document

    doc = load_document(text, "tweetinfo.pipeline")
    return PipelineConfig.from_stage_names(doc["stages"])


# ---------------------------------------------------------------------------
# Stage transforms

def normalize_whitespace(text: str) -> str:
    return " ".join(text.split())


def _remove_literal(text: str, token: str) -> str:
    # Iterate to a fixed point so removals can't splice the token back
    # together (e.g. "@@USERUSER"): guarantees the output never contains it.
    while token in text:
        text = text.replace(token, " ")
    return text


_REPEAT_RE = re.compile(r"(.)\1{2,}", flags=re.DOTALL)


def compress_repeats(text: str) -> str:
    """Runs of 3+ identical scalars shrink to exactly 2; shorter runs untouched."""
    return _REPEAT_RE.sub(r"\1\1", text)


def remove_non_alnum(text: str) -> str:
    # Whitespace scalars survive here; the stage-level normalization pass
    # collapses them to single spaces.
    return "".join(c for c in text if c.isalnum() or c.isspace())


def remove_stopwords(text: str, stopword_list: frozenset[str]) -> str:
    """Drop whitespace tokens whose lowercase form is a stopword."""
    return " ".join(tok for tok in text.split() if tok.lower() not in stopword_list)


def _suffix_rule_step(word: str) -> str | None:
    """One suffix-rule application, or None when no rule matches.

    Suffixes match case-insensitively.  The terminal-s rule skips "ss" and
    "us" endings so doubled plurals and Latinate words (virus, boss) survive.
    """
    lower = word.lower()
    if lower.endswith("ies"):
        y = "Y" if word[-3].isupper() else "y"
        return word[:-3] + y
    if lower.endswith("sses"):
        return word[:-2]
    if lower.endswith("s") and len(word) > 3 and not lower.endswith(("ss", "us")):
        return word[:-1]
    if lower.endswith("ing") and len(word) - 3 >= 3:
        return word[:-3]
    if lower.endswith("ed") and len(word) - 2 >= 3:
        return word[:-2]
    return None


def lemmatize_token(token: str, exceptions: dict[str, str]) -> str:
    """Exception-table lookup first, else suffix rules, iterated to a fixed point.

    The table is re-consulted after each rewrite (a stripped suffix can expose
    an irregular form), which is what makes the stage idempotent.  The
    iteration cap guards against cyclic user-supplied tables.
    """
    word = token
    for _ in range(len(token) + 10):
        hit = exceptions.get(word)
        if hit is not None:
            if hit == word:
                return word
            word = hit
            continue
        nxt = _suffix_rule_step(word)
        if nxt is None:
            return word
        word = nxt
    return word


def lemmatize(text: str, exceptions: dict[str, str]) -> str:
    return " ".join(lemmatize_token(tok, exceptions) for tok in text.split())


def apply_stage(stage: Stage, text: str, cfg: PipelineConfig) -> str:
    """Apply one stage; output is whitespace-normalized and trimmed."""
    if stage is Stage.REMOVE_USER_TOKENS:
        out = _remove_literal(text, USER_TOKEN)
    elif stage is Stage.REMOVE_URL_TOKENS:
        out = _remove_literal(text, URL_TOKEN)
    elif stage is Stage.REMOVE_HASH_CHAR:
        out = text.replace("#", "")
    elif stage is Stage.COMPRESS_REPEATS:
        out = compress_repeats(text)
    elif stage is Stage.EMOJI_TO_WORDS:
        out = cfg.emoji_lexicon.replace(text)
    elif stage is Stage.REMOVE_NON_ALNUM:
        out = remove_non_alnum(text)
    elif stage is Stage.REMOVE_STOPWORDS:
        out = remove_stopwords(text, cfg.stopwords)
    elif stage is Stage.LEMMATIZE:
        out = lemmatize(text, cfg.lemma_exceptions)
    elif stage is Stage.LOWERCASE:
        out = text.lower()
    else:  # pragma: no cover
        raise ConfigError(f"unhandled stage {stage}")
    return normalize_whitespace(out)


def apply_pipeline(cfg: PipelineConfig, text: str) -> str:
    """Left-to-right composition of the configured stages."""
    for stage in cfg.stages:
        text = apply_stage(stage, text, cfg)
    return normalize_whitespace(text)


def apply_pipeline_batch(cfg: PipelineConfig, texts: list[str], jobs: int = 1) -> list[str]:
    """Clean many texts, preserving order; ``jobs > 1`` parallelizes per record."""
    if jobs == 1 or len(texts) < 64:
        return [apply_pipeline(cfg, t) for t in texts]
    return Parallel(n_jobs=jobs)(delayed(apply_pipeline)(cfg, t) for t in texts)
