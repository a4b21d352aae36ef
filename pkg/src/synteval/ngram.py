"""Add-k smoothed n-gram language model with incremental training and
validation-perplexity learning curves.

Smoothing and boundary conventions, fixed and hand-checkable:

* probabilities are add-k over the vocabulary: P(t|c) = (count + k) / (total + k|V|);
* a context with no observations backs off to the uniform 1/|V|, whatever k is;
* for order >= 2, each sentence is padded with (order - 1) start symbols used
  as context only, and one end symbol that is predicted and scored like any
  token; order 1 uses no boundary symbols at all;
* everything internal is natural log; perplexity is exp of the mean negative
  log-probability per scored token, unknown tokens included.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Corpus, Sentence
from .scoring import CAUSAL, OOVError, Scorer, ScoreRequest, ScoreResult

BOS = "<s>"
EOS = "</s>"


class NGramModel(Scorer):
    """Counts-backed causal scorer. Training order never affects the result."""

    mode = CAUSAL

    def __init__(
        self,
        order: int,
        k: float = 1.0,
        vocabulary: Iterable[str] | None = None,
        model_id: str | None = None,
    ):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        self.order = order
        self.k = k
        self.counts: dict[tuple[str, ...], Counter[str]] = {}
        self.totals: dict[tuple[str, ...], int] = {}
        self.frozen_vocabulary = vocabulary is not None
        self.vocabulary: set[str] = set(vocabulary) if vocabulary is not None else set()
        if self.frozen_vocabulary and order >= 2:
            self.vocabulary.update((BOS, EOS))
        self.scorer_id = model_id or f"ngram{order}-k{k:g}"

    # --- training -----------------------------------------------------------

    def update(self, sentences: Iterable[Sentence]) -> None:
        """Accumulate counts; extends the vocabulary unless it was frozen.

        A frozen vocabulary fixes the event space, so training tokens outside
        it are an error (they would leak probability mass out of the
        distribution). Cap or map the text first.
        """
        pad = self.order - 1
        for sent in sentences:
            if not self.frozen_vocabulary:
                self.vocabulary.update(sent)
            else:
                for tok in sent:
                    if tok not in self.vocabulary:
                        raise ValueError(
                            f"token {tok!r} is outside the frozen vocabulary"
                        )
            if self.order == 1:
                events: Sequence[str] = sent
                seq: Sequence[str] = sent
            else:
                if not self.frozen_vocabulary:
                    self.vocabulary.update((BOS, EOS))
                seq = (BOS,) * pad + tuple(sent) + (EOS,)
                events = seq[pad:]
            for i, target in enumerate(events):
                context = tuple(seq[i : i + pad]) if pad else ()
                bucket = self.counts.get(context)
                if bucket is None:
                    bucket = self.counts[context] = Counter()
                    self.totals[context] = 0
                bucket[target] += 1
                self.totals[context] += 1

    # --- probabilities --------------------------------------------------------

    def _context(self, left_context: Sequence[str]) -> tuple[str, ...]:
        pad = self.order - 1
        if pad == 0:
            return ()
        padded = (BOS,) * pad + tuple(left_context)
        return padded[-pad:]

    def probability(self, left_context: Sequence[str], target: str) -> float:
        context = self._context(left_context)
        total = self.totals.get(context, 0)
        size = len(self.vocabulary)
        if size == 0:
            raise ValueError("model has an empty vocabulary")
        if total == 0:
            return 1.0 / size
        count = self.counts[context][target]
        return (count + self.k) / (total + self.k * size)

    def log_prob(self, left_context: Sequence[str], target: str) -> float:
        """Natural-log probability; raises OOVError for unknown targets."""
        if target not in self.vocabulary:
            raise OOVError(target, detail=self.scorer_id)
        p = self.probability(left_context, target)
        return math.log(p) if p > 0 else -math.inf

    def score_batch(self, requests: Sequence[ScoreRequest]) -> list[ScoreResult]:
        return [
            ScoreResult(self.log_prob(req.left_context, req.target)) for req in requests
        ]

    def in_vocabulary(self, token: str) -> bool:
        return token in self.vocabulary


def train_ngram(corpus: Corpus, order: int, k: float = 1.0, model_id: str | None = None) -> NGramModel:
    if not corpus.sentences:
        raise ValueError("training corpus is empty")
    model = NGramModel(order, k, model_id=model_id)
    model.update(corpus.sentences)
    return model


def _sentence_nll(model: NGramModel, sent: Sentence) -> list[float]:
    pad = model.order - 1
    if model.order == 1:
        seq: tuple[str, ...] = tuple(sent)
        events = seq
    else:
        seq = (BOS,) * pad + tuple(sent) + (EOS,)
        events = seq[pad:]
    terms = []
    for i, target in enumerate(events):
        context = seq[i : i + pad] if pad else ()
        p = model.probability(context, target)
        terms.append(-math.log(p) if p > 0 else math.inf)
    return terms


def perplexity(model: NGramModel, corpus: Corpus) -> float:
    """exp of the mean negative log-probability per scored token."""
    terms: list[float] = []
    for sent in corpus.sentences:
        terms.extend(_sentence_nll(model, sent))
    if not terms:
        raise ValueError("validation corpus is empty")
    return math.exp(math.fsum(terms) / len(terms))


# --- learning curves ----------------------------------------------------------


@dataclass(frozen=True)
class PerplexityPoint:
    batch_index: int
    perplexity: float


@dataclass(frozen=True)
class LearningCurve:
    label: str
    points: tuple[PerplexityPoint, ...]

    @property
    def final_batch_index(self) -> int:
        return self.points[-1].batch_index if self.points else 0


def learning_curve(
    train: Corpus,
    valid: Corpus,
    order: int,
    k: float = 1.0,
    chunk: int = 10,
    eval_every: int = 1,
    label: str = "",
) -> LearningCurve:
    """Ingest ``chunk`` sentences per batch; record validation perplexity every
    ``eval_every`` batches.

    The vocabulary is fixed upfront from the union of both splits so every
    evaluation ranges over the same event space; tokens the model has not
    ingested yet simply carry smoothed (or uniform backoff) probability.
    """
    if chunk < 1 or eval_every < 1:
        raise ValueError("chunk and eval_every must be >= 1")
    if not valid.sentences:
        raise ValueError("validation split is empty")
    vocab = train.vocabulary() | valid.vocabulary()
    model = NGramModel(order, k, vocabulary=vocab)
    points: list[PerplexityPoint] = []
    batch_index = 0
    for lo in range(0, len(train.sentences), chunk):
        model.update(train.sentences[lo : lo + chunk])
        batch_index += 1
        if batch_index % eval_every == 0:
            points.append(PerplexityPoint(batch_index, perplexity(model, valid)))
    return LearningCurve(label=label or f"ngram{order}-k{k:g}", points=tuple(points))


def align_curves(curves: Sequence[LearningCurve]) -> list[LearningCurve]:
    """Truncate every curve to the smallest final batch index, preserving order."""
    if not curves:
        raise ValueError("no curves to align")
    cutoff = min(curve.final_batch_index for curve in curves)
    return [
        LearningCurve(
            label=curve.label,
            points=tuple(p for p in curve.points if p.batch_index <= cutoff),
        )
        for curve in curves
    ]


def write_curves_csv(curves: Sequence[LearningCurve], path: str | Path) -> None:
    import csv

    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["batch_index", "perplexity", "label"])
        for curve in curves:
            for point in curve.points:
                writer.writerow([point.batch_index, repr(point.perplexity), curve.label])


def read_curves_csv(path: str | Path) -> list[LearningCurve]:
    import csv

    path = Path(path)
    by_label: dict[str, list[PerplexityPoint]] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            by_label.setdefault(row["label"], []).append(
                PerplexityPoint(int(row["batch_index"]), float(row["perplexity"]))
            )
    return [LearningCurve(label, tuple(points)) for label, points in by_label.items()]


# --- persistence ---------------------------------------------------------------


def save_model(model: NGramModel, path: str | Path) -> None:
    """JSON count table: contexts are space-joined token tuples."""
    payload = {
        "format": "synteval-ngram",
        "version": 1,
        "order": model.order,
        "k": model.k,
        "model_id": model.scorer_id,
        "vocabulary": sorted(model.vocabulary),
        "counts": {
            " ".join(context): dict(bucket) for context, bucket in model.counts.items()
        },
    }
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=None), encoding="utf-8"
    )


def load_model(path: str | Path) -> NGramModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != "synteval-ngram":
        raise ValueError(f"{path} is not an n-gram model file")
    model = NGramModel(
        payload["order"],
        payload["k"],
        vocabulary=payload["vocabulary"],
        model_id=payload["model_id"],
    )
    for context_text, bucket in payload["counts"].items():
        context = tuple(context_text.split()) if context_text else ()
        counter = Counter({tok: int(c) for tok, c in bucket.items()})
        model.counts[context] = counter
        model.totals[context] = sum(counter.values())
    return model
