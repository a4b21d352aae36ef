"""Corpus perturbations producing typologically-unattested word orders.

Five transforms plus matched controls, all pure per-sentence functions:

  partial_reverse   insert a marker at a random slot, reverse the suffix
  reverse_control   insert the marker at the same slot, reverse nothing
  full_reverse      insert the marker at the same slot, reverse everything
  switch_indices    swap tokens 0 and 2 (sentences shorter than 3 unchanged)
  token_hop         marker three original tokens after every VERB
  no_hop            marker immediately after every VERB

The random slot is drawn per sentence from a stream keyed by
(seed, sentence index), so a control corpus and its perturbed counterpart
built with the same seed place markers at identical positions, and output is
independent of processing order. Every transform keeps compared corpora at
exactly equal token counts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Corpus, Sentence, TaggedSentence

PERTURBATIONS = (
    "partial_reverse",
    "reverse_control",
    "full_reverse",
    "switch_indices",
    "token_hop",
    "no_hop",
)

REVERSE_MARKER = "<rev>"

# Single-character candidates for hop markers, tried in order; "v" first so
# plain English corpora pick it.
MARKER_CANDIDATES = (
    "v", "q", "z", "x", "j", "w", "k", "y", "b", "g",
    "Ч",  # Cyrillic Che
    "ø", "ñ", "ξ", "†",
)


class PerturbError(Exception):
    pass


@dataclass(frozen=True)
class MarkerToken:
    """A single-character token guaranteed absent from the source vocabulary."""

    surface: str

    def __post_init__(self) -> None:
        if len(self.surface) != 1 or self.surface.isspace():
            raise PerturbError(
                f"marker must be a single non-whitespace character, got {self.surface!r}"
            )


def pick_marker(
    vocabulary: Iterable[str], candidates: Sequence[str] = MARKER_CANDIDATES
) -> MarkerToken:
    vocab = set(vocabulary)
    for candidate in candidates:
        if candidate not in vocab:
            return MarkerToken(candidate)
    raise PerturbError("no marker candidate is absent from the vocabulary")


def marker_index(seed: int, sentence_index: int, length: int) -> int:
    """The shared insertion slot in {0..length}, uniform, keyed per sentence."""
    return random.Random(f"{seed}:{sentence_index}").randrange(length + 1)


# --- per-sentence transforms (explicit index, pure) -------------------------


def partial_reverse(tokens: Sequence[str], marker: str, index: int) -> Sentence:
    """Marker at ``index``, suffix after it reversed. Length grows by one."""
    _check_index(tokens, index)
    return tuple(tokens[:index]) + (marker,) + tuple(reversed(tokens[index:]))


def reverse_control(tokens: Sequence[str], marker: str, index: int) -> Sentence:
    """Marker at ``index``, order untouched."""
    _check_index(tokens, index)
    return tuple(tokens[:index]) + (marker,) + tuple(tokens[index:])


def full_reverse(tokens: Sequence[str], marker: str, index: int) -> Sentence:
    """Marker at ``index``, then the whole augmented sentence reversed."""
    return tuple(reversed(reverse_control(tokens, marker, index)))


def _check_index(tokens: Sequence[str], index: int) -> None:
    if not 0 <= index <= len(tokens):
        raise PerturbError(f"marker index {index} out of range for length {len(tokens)}")


def switch_indices(tokens: Sequence[str]) -> Sentence:
    if len(tokens) < 3:
        return tuple(tokens)
    out = list(tokens)
    out[0], out[2] = out[2], out[0]
    return tuple(out)


def _hop_positions(tagged: TaggedSentence, offset: int) -> list[int]:
    """Insertion slots, in original-token coordinates, one per VERB."""
    _check_tagged(tagged)
    length = len(tagged)
    return [
        min(v + offset + 1, length)
        for v, (_, tag) in enumerate(tagged)
        if tag == "VERB"
    ]


def _insert_markers(tokens: Sequence[str], positions: list[int], marker: str) -> Sentence:
    # Right-to-left so earlier original indices stay valid.
    out = list(tokens)
    for pos in sorted(positions, reverse=True):
        out.insert(pos, marker)
    return tuple(out)


def token_hop(tagged: TaggedSentence, marker: str) -> Sentence:
    """Marker after the third original token following each VERB (or at the
    end when fewer than three follow). Markers never shift the offsets of
    later insertions."""
    positions = _hop_positions(tagged, offset=3)
    return _insert_markers([tok for tok, _ in tagged], positions, marker)


def no_hop(tagged: TaggedSentence, marker: str) -> Sentence:
    """Marker immediately after each VERB; the matched control for token_hop."""
    positions = _hop_positions(tagged, offset=0)
    return _insert_markers([tok for tok, _ in tagged], positions, marker)


def _check_tagged(tagged: TaggedSentence) -> None:
    for item in tagged:
        if (
            not isinstance(item, tuple)
            or len(item) != 2
            or not all(isinstance(part, str) for part in item)
        ):
            raise PerturbError(
                "hop perturbations need tagged input: one (token, UPOS) pair per position"
            )


# --- corpus level ------------------------------------------------------------


def perturb_corpus(
    corpus: Corpus,
    perturbation: str,
    marker: str | MarkerToken | None = None,
    seed: int = 0,
    tagged: Sequence[TaggedSentence] | None = None,
) -> Corpus:
    """Apply one named transform to every sentence.

    The marker must be absent from the corpus vocabulary. Hop perturbations
    require ``tagged`` sentences aligned one to one with the corpus.
    """
    if perturbation not in PERTURBATIONS:
        raise PerturbError(f"unknown perturbation {perturbation!r}; expected one of {PERTURBATIONS}")
    if isinstance(marker, MarkerToken):
        marker = marker.surface

    if perturbation == "switch_indices":
        return Corpus(tuple(switch_indices(s) for s in corpus.sentences), corpus.split)

    if marker is None:
        if perturbation in ("partial_reverse", "reverse_control", "full_reverse"):
            marker = REVERSE_MARKER
        else:
            marker = pick_marker(corpus.vocabulary()).surface
    if marker in corpus.vocabulary():
        raise PerturbError(f"marker {marker!r} already occurs in the corpus vocabulary")

    if perturbation in ("token_hop", "no_hop"):
        if tagged is None:
            raise PerturbError(f"{perturbation} requires a tagged corpus")
        if len(tagged) != len(corpus.sentences):
            raise PerturbError(
                f"tagged corpus has {len(tagged)} sentences, plain corpus has "
                f"{len(corpus.sentences)}"
            )
        for i, (sent, tags) in enumerate(zip(corpus.sentences, tagged)):
            if tuple(tok for tok, _ in tags) != sent:
                raise PerturbError(f"tagged sentence {i} does not match the plain corpus")
        transform = token_hop if perturbation == "token_hop" else no_hop
        return Corpus(tuple(transform(tags, marker) for tags in tagged), corpus.split)

    reverse_transform = {
        "partial_reverse": partial_reverse,
        "reverse_control": reverse_control,
        "full_reverse": full_reverse,
    }[perturbation]
    out = tuple(
        reverse_transform(sent, marker, marker_index(seed, i, len(sent)))
        for i, sent in enumerate(corpus.sentences)
    )
    return Corpus(out, corpus.split)


@dataclass(frozen=True)
class ParityReport:
    """Token/sentence-count comparison for a (control, perturbed) corpus pair."""

    ok: bool
    sentence_counts: tuple[int, int]
    token_counts: tuple[int, int]
    first_divergence: int | None
    detail: str

    def __bool__(self) -> bool:
        return self.ok


def verify_paired_counts(a: Corpus, b: Corpus) -> ParityReport:
    """Equal sentence counts and equal total token counts, or the first
    sentence index where the per-sentence lengths diverge."""
    sent_counts = (len(a.sentences), len(b.sentences))
    tok_counts = (a.token_count, b.token_count)
    if sent_counts[0] != sent_counts[1]:
        return ParityReport(
            False, sent_counts, tok_counts, None,
            f"sentence counts differ: {sent_counts[0]} vs {sent_counts[1]}",
        )
    for i, (sa, sb) in enumerate(zip(a.sentences, b.sentences)):
        if len(sa) != len(sb):
            return ParityReport(
                False, sent_counts, tok_counts, i,
                f"sentence {i}: {len(sa)} vs {len(sb)} tokens",
            )
    if tok_counts[0] != tok_counts[1]:
        return ParityReport(
            False, sent_counts, tok_counts, None,
            f"token counts differ: {tok_counts[0]} vs {tok_counts[1]}",
        )
    return ParityReport(True, sent_counts, tok_counts, None, "parity holds")
