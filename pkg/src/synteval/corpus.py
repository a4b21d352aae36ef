"""Line-per-sentence corpora: loading, saving, vocabulary capping, tagged TSV I/O.

A corpus file is UTF-8, LF line endings, one sentence per line,
whitespace-tokenized. Punctuation stays attached to its word ("furiously."
is a single token). Tagged corpora use a TSV format with one
``token<TAB>UPOS`` pair per line and a blank line between sentences.
"""

from __future__ import annotations

import logging
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

log = logging.getLogger(__name__)

UNK = "<unk>"
SPLITS = ("train", "validation", "test")

# One whitespace-free surface form.
Token = str
Sentence = tuple[Token, ...]
# One (token, UPOS tag) pair per position.
TaggedSentence = tuple[tuple[Token, str], ...]

UPOS_TAGS = frozenset({
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
})


class CorpusError(Exception):
    """Malformed corpus or tagged-corpus input."""


def _check_token(token: str) -> str:
    if not token or any(ch.isspace() for ch in token):
        raise CorpusError(f"invalid token {token!r}: empty or contains whitespace")
    return token


@dataclass(frozen=True)
class Corpus:
    """An immutable ordered list of sentences for one split.

    Immutability makes instances safe to share across parallel workers;
    transforms return new Corpus objects.
    """

    sentences: tuple[Sentence, ...]
    split: str = "train"

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    def vocabulary(self) -> set[str]:
        vocab: set[str] = set()
        for sent in self.sentences:
            vocab.update(sent)
        return vocab

    def lines(self) -> Iterator[str]:
        for sent in self.sentences:
            yield " ".join(sent)


def load_corpus(path: str | Path, split: str = "train") -> Corpus:
    """Read a line-per-sentence file. Blank lines are skipped and counted."""
    path = Path(path)
    sentences: list[Sentence] = []
    skipped = 0
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                skipped += 1
                continue
            sentences.append(tuple(sys.intern(tok) for tok in parts))
    if skipped:
        log.warning("skipped %d blank line(s) while loading %s", skipped, path)
    return Corpus(tuple(sentences), split)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in corpus.lines():
            fh.write(line + "\n")


def top_k_vocabulary(corpus: Corpus, k: int) -> list[str]:
    """The k most frequent tokens; frequency ties go to the earlier first occurrence.

    The reserved ``<unk>`` token never competes for a slot (it is always kept
    by cap_vocabulary), so capping an already-capped corpus changes nothing.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    counts: Counter[str] = Counter()
    first_seen: dict[str, int] = {}
    position = 0
    for sent in corpus.sentences:
        for tok in sent:
            if tok != UNK:
                counts[tok] += 1
                if tok not in first_seen:
                    first_seen[tok] = position
            position += 1
    ranked = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))
    return ranked[:k]


def cap_vocabulary(corpus: Corpus, k: int, vocabulary: Iterable[str] | None = None) -> Corpus:
    """Replace tokens outside the top-k vocabulary with the ``<unk>`` token.

    Rank on the train split and pass the resulting ``vocabulary`` in when
    capping validation/test splits, so held-out data never influences the
    ranking. With ``vocabulary=None`` the ranking is computed from ``corpus``
    itself. Sentence count and per-sentence length are preserved.
    """
    keep = set(top_k_vocabulary(corpus, k)) if vocabulary is None else set(vocabulary)
    keep.add(UNK)
    capped = tuple(
        tuple(tok if tok in keep else UNK for tok in sent)
        for sent in corpus.sentences
    )
    return Corpus(capped, corpus.split)


def load_tagged_corpus(path: str | Path) -> tuple[TaggedSentence, ...]:
    """Read token/UPOS TSV. Unknown tags and malformed rows are errors."""
    path = Path(path)
    sentences: list[TaggedSentence] = []
    current: list[tuple[str, str]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(tuple(current))
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{path}:{lineno}: expected token<TAB>UPOS, got {line!r}")
            token, tag = parts
            _check_token(token)
            if tag not in UPOS_TAGS:
                raise CorpusError(f"{path}:{lineno}: unknown UPOS tag {tag!r}")
            current.append((sys.intern(token), sys.intern(tag)))
    if current:
        sentences.append(tuple(current))
    return tuple(sentences)


def save_tagged_corpus(sentences: Iterable[TaggedSentence], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for sent in sentences:
            for token, tag in sent:
                fh.write(f"{token}\t{tag}\n")
            fh.write("\n")


def strip_tags(sentences: Iterable[TaggedSentence], split: str = "train") -> Corpus:
    """Drop tags, keeping token sequences, so tagged data can feed plain-text ops."""
    return Corpus(tuple(tuple(tok for tok, _ in sent) for sent in sentences), split)
