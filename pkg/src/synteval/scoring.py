"""Minimal-pair success criteria over probability scorers.

A scorer answers "how probable is this target token in this context" in
natural log space. Causal scorers see only the left context; masked scorers
see the whole sentence with the target hidden. A pair counts as a success
iff the grammatical member's critical token is strictly more probable than
the ungrammatical member's; exact ties are failures. Only the ordering of
the two log-probabilities matters, never their magnitudes.
"""

from __future__ import annotations

import abc
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .grammar import MinimalPairRecord, ParadigmInstance

CAUSAL = "causal"
MASKED = "masked"
MODES = (CAUSAL, MASKED)


class ScoringError(Exception):
    pass


class OOVError(ScoringError):
    """Target token outside the scorer's vocabulary. Never silently unked."""

    def __init__(self, token: str, detail: str = ""):
        self.token = token
        message = f"target token {token!r} is not in the scorer's vocabulary"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class DatasetIntegrityError(ScoringError):
    """A record violated the equal-left-context contract."""


@dataclass(frozen=True)
class ScoreRequest:
    mode: str
    left_context: tuple[str, ...]
    target: str
    right_context: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class ScoreResult:
    log_probability: float  # natural log; -inf encodes zero probability


@dataclass(frozen=True)
class CriterionOutcome:
    pair_id: str
    p_grammatical: float
    p_ungrammatical: float
    success: bool


@dataclass
class AccuracyReport:
    phenomenon: str
    scorer_id: str
    seed_accuracies: dict[int, float]

    @property
    def mean_accuracy(self) -> float:
        return sum(self.seed_accuracies.values()) / len(self.seed_accuracies)


class Scorer(abc.ABC):
    """Probability backend contract shared by in-process and remote scorers."""

    scorer_id: str = "scorer"
    mode: str = CAUSAL
    max_batch: int | None = None  # None: unbounded

    def in_vocabulary(self, token: str) -> bool:
        """Cheap local vocabulary check; backends without one answer True and
        report OOV per request instead."""
        return True

    @abc.abstractmethod
    def score_batch(self, requests: Sequence[ScoreRequest]) -> list[ScoreResult]:
        """One result per request, in request order."""


class UniformScorer(Scorer):
    """Assigns 1/|V| to everything; useful as a tie-rule and backoff oracle."""

    def __init__(self, vocabulary_size: int, scorer_id: str = "uniform"):
        if vocabulary_size < 1:
            raise ValueError("vocabulary_size must be >= 1")
        self.vocabulary_size = vocabulary_size
        self.scorer_id = scorer_id

    def score_batch(self, requests: Sequence[ScoreRequest]) -> list[ScoreResult]:
        lp = -math.log(self.vocabulary_size)
        return [ScoreResult(lp) for _ in requests]


def build_request(instance: ParadigmInstance, mode: str) -> ScoreRequest:
    """Critical-region request for one rendered sentence."""
    i = instance.critical_span[0]
    right = instance.tokens[i + 1 :] if mode == MASKED else ()
    return ScoreRequest(
        mode=mode,
        left_context=instance.tokens[:i],
        target=instance.tokens[i],
        right_context=right,
    )


def score_critical_region(
    record: MinimalPairRecord, condition: str, scorer: Scorer
) -> ScoreResult:
    instance = record.instance(condition)
    request = build_request(instance, scorer.mode)
    if not scorer.in_vocabulary(request.target):
        raise OOVError(request.target)
    return scorer.score_batch([request])[0]


def _check_pair(good: ParadigmInstance, bad: ParadigmInstance, pair_id: str) -> None:
    gi, bi = good.critical_span[0], bad.critical_span[0]
    if good.tokens[:gi] != bad.tokens[:bi]:
        raise DatasetIntegrityError(
            f"pair {pair_id or '<unnamed>'}: left contexts of conditions "
            f"{good.condition!r} and {bad.condition!r} differ"
        )


def evaluate_pair(
    record: MinimalPairRecord, scorer: Scorer, pair_id: str = ""
) -> CriterionOutcome:
    good, bad = record.pair()
    _check_pair(good, bad, pair_id)
    for inst in (good, bad):
        target = inst.tokens[inst.critical_span[0]]
        if not scorer.in_vocabulary(target):
            raise OOVError(target, detail=f"pair {pair_id or '<unnamed>'}")
    results = scorer.score_batch(
        [build_request(good, scorer.mode), build_request(bad, scorer.mode)]
    )
    p_gram, p_ungram = results[0].log_probability, results[1].log_probability
    return CriterionOutcome(
        pair_id=pair_id,
        p_grammatical=p_gram,
        p_ungrammatical=p_ungram,
        success=p_gram > p_ungram,
    )


def evaluate_dataset(
    records: Sequence[MinimalPairRecord],
    scorer: Scorer,
    pair_ids: Sequence[str] | None = None,
) -> list[CriterionOutcome]:
    """Evaluate every record, batching scorer calls up to ``scorer.max_batch``."""
    if pair_ids is None:
        pair_ids = [f"{rec.phenomenon}:{rec.seed}:{i:05d}" for i, rec in enumerate(records)]
    if len(pair_ids) != len(records):
        raise ValueError("pair_ids must match records one to one")

    requests: list[ScoreRequest] = []
    pairs: list[tuple[str, ParadigmInstance, ParadigmInstance]] = []
    for record, pair_id in zip(records, pair_ids):
        good, bad = record.pair()
        _check_pair(good, bad, pair_id)
        for inst in (good, bad):
            target = inst.tokens[inst.critical_span[0]]
            if not scorer.in_vocabulary(target):
                raise OOVError(target, detail=f"pair {pair_id}")
        requests.append(build_request(good, scorer.mode))
        requests.append(build_request(bad, scorer.mode))
        pairs.append((pair_id, good, bad))

    chunk = scorer.max_batch or len(requests) or 1
    results: list[ScoreResult] = []
    for lo in range(0, len(requests), chunk):
        results.extend(scorer.score_batch(requests[lo : lo + chunk]))

    outcomes = []
    for i, (pair_id, _, _) in enumerate(pairs):
        p_gram = results[2 * i].log_probability
        p_ungram = results[2 * i + 1].log_probability
        outcomes.append(
            CriterionOutcome(
                pair_id=pair_id,
                p_grammatical=p_gram,
                p_ungrammatical=p_ungram,
                success=p_gram > p_ungram,
            )
        )
    return outcomes


def accuracy(outcomes: Iterable[CriterionOutcome]) -> float:
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("no outcomes to aggregate")
    return sum(o.success for o in outcomes) / len(outcomes)


def run_evaluation(
    phenomenon,
    scorer: Scorer,
    seeds: Sequence[int],
    n: int,
    out_csv: str | Path | None = None,
) -> AccuracyReport:
    """Regenerate the dataset for every seed, evaluate, and aggregate.

    ``phenomenon`` may be a built-in id ("atb", "pg", "tte") or a GrammarSpec.
    With ``out_csv`` set, per-pair rows are written as
    pair_id, seed, p_gram, p_ungram, success.
    """
    from .paradigms import generate_dataset

    if not seeds:
        raise ValueError("seeds must be non-empty")
    name = phenomenon if isinstance(phenomenon, str) else phenomenon.name
    rows: list[tuple[str, int, float, float, int]] = []
    seed_accuracies: dict[int, float] = {}
    for seed in seeds:
        records = generate_dataset(phenomenon, n, seed)
        pair_ids = [f"{name}:{seed}:{i:05d}" for i in range(len(records))]
        outcomes = evaluate_dataset(records, scorer, pair_ids)
        seed_accuracies[seed] = accuracy(outcomes)
        rows.extend(
            (o.pair_id, seed, o.p_grammatical, o.p_ungrammatical, int(o.success))
            for o in outcomes
        )
    if out_csv is not None:
        write_outcomes_csv(rows, out_csv)
    return AccuracyReport(
        phenomenon=name, scorer_id=scorer.scorer_id, seed_accuracies=seed_accuracies
    )


def write_outcomes_csv(
    rows: Iterable[tuple[str, int, float, float, int]], path: str | Path
) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pair_id", "seed", "p_gram", "p_ungram", "success"])
        for pair_id, seed, p_gram, p_ungram, success in rows:
            writer.writerow([pair_id, seed, repr(p_gram), repr(p_ungram), success])


def read_outcomes_csv(path: str | Path) -> list[tuple[str, int, float, float, int]]:
    path = Path(path)
    rows = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append(
                (
                    row["pair_id"],
                    int(row["seed"]),
                    float(row["p_gram"]),
                    float(row["p_ungram"]),
                    int(row["success"]),
                )
            )
    return rows
