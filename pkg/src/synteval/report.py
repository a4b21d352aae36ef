"""Aggregation into accuracy-by-model tables and plot-ready files.

Training-set sizes are annotated with a human-equivalent exposure duration
at 30,000 words per day. Rendering convention, fixed here because published
roundings of this kind are rarely self-consistent: a quantity under 60 days
prints as days, under 330 days as 30-day months, and anything longer as
365-day years, each rounded to the nearest integer.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .scoring import AccuracyReport

WORDS_PER_DAY = 30_000
DAYS_PER_MONTH = 30.0
DAYS_PER_YEAR = 365.0
_MONTHS_CUTOFF_DAYS = 60.0
_YEARS_CUTOFF_DAYS = 330.0


class ReportError(Exception):
    pass


@dataclass(frozen=True)
class HumanEquivalent:
    days: float
    unit: str  # "day" | "month" | "year"
    value: int

    @property
    def text(self) -> str:
        return f"{self.value} {self.unit}{'' if self.value == 1 else 's'}"


def human_equivalent(tokens: int) -> HumanEquivalent:
    """Exposure duration for a token count at 30,000 words per day."""
    if tokens < 0:
        raise ValueError(f"tokens must be >= 0, got {tokens}")
    days = tokens / WORDS_PER_DAY
    if days < _MONTHS_CUTOFF_DAYS:
        return HumanEquivalent(days, "day", round(days))
    if days < _YEARS_CUTOFF_DAYS:
        return HumanEquivalent(days, "month", round(days / DAYS_PER_MONTH))
    return HumanEquivalent(days, "year", round(days / DAYS_PER_YEAR))


@dataclass(frozen=True)
class ModelLedgerEntry:
    model_id: str
    training_tokens: int

    @property
    def human(self) -> HumanEquivalent:
        return human_equivalent(self.training_tokens)


def reference_ledger() -> dict[str, ModelLedgerEntry]:
    """The eight standard baselines, keyed by model id."""
    entries = [
        ModelLedgerEntry("childes-lstm", 8_600_000),
        ModelLedgerEntry("childes-transformer", 8_600_000),
        ModelLedgerEntry("babylm-10m", 10_000_000),
        ModelLedgerEntry("wikipedia-transformer", 90_000_000),
        ModelLedgerEntry("babylm-100m", 100_000_000),
        ModelLedgerEntry("bert-base-uncased", 3_500_000_000),
        ModelLedgerEntry("gpt2", 8_000_000_000),
        ModelLedgerEntry("llama-3.2-3b", 9_000_000_000_000),
    ]
    return {entry.model_id: entry for entry in entries}


@dataclass(frozen=True)
class ReportRow:
    model_id: str
    phenomenon: str
    training_tokens: int
    log10_training_tokens: float
    human_equivalent: str
    mean_accuracy: float
    seed_accuracies: tuple[float, ...]


def build_report(
    reports: Sequence[AccuracyReport], ledger: Mapping[str, ModelLedgerEntry]
) -> list[ReportRow]:
    """Rows ordered by training size ascending; order of ``reports`` is irrelevant."""
    rows = []
    for report in reports:
        entry = ledger.get(report.scorer_id)
        if entry is None:
            raise ReportError(f"no ledger entry for scorer {report.scorer_id!r}")
        rows.append(
            ReportRow(
                model_id=report.scorer_id,
                phenomenon=report.phenomenon,
                training_tokens=entry.training_tokens,
                log10_training_tokens=math.log10(entry.training_tokens),
                human_equivalent=entry.human.text,
                mean_accuracy=report.mean_accuracy,
                seed_accuracies=tuple(
                    report.seed_accuracies[s] for s in sorted(report.seed_accuracies)
                ),
            )
        )
    rows.sort(key=lambda r: (r.training_tokens, r.model_id, r.phenomenon))
    return rows


def write_report_csv(rows: Iterable[ReportRow], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "model_id",
                "phenomenon",
                "training_tokens",
                "log10_training_tokens",
                "human_equivalent",
                "mean_accuracy",
                "seed_accuracies",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row.model_id,
                    row.phenomenon,
                    row.training_tokens,
                    repr(row.log10_training_tokens),
                    row.human_equivalent,
                    repr(row.mean_accuracy),
                    ";".join(repr(a) for a in row.seed_accuracies),
                ]
            )


def read_report_csv(path: str | Path) -> list[ReportRow]:
    path = Path(path)
    rows = []
    with path.open(encoding="utf-8", newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                ReportRow(
                    model_id=record["model_id"],
                    phenomenon=record["phenomenon"],
                    training_tokens=int(record["training_tokens"]),
                    log10_training_tokens=float(record["log10_training_tokens"]),
                    human_equivalent=record["human_equivalent"],
                    mean_accuracy=float(record["mean_accuracy"]),
                    seed_accuracies=tuple(
                        float(a) for a in record["seed_accuracies"].split(";") if a
                    ),
                )
            )
    return rows


def emit_report(
    reports: Sequence[AccuracyReport],
    ledger: Mapping[str, ModelLedgerEntry],
    out_csv: str | Path,
    out_svg: str | Path | None = None,
) -> list[ReportRow]:
    rows = build_report(reports, ledger)
    write_report_csv(rows, out_csv)
    if out_svg is not None:
        render_accuracy_svg(rows, out_svg)
    return rows


def render_accuracy_svg(rows: Sequence[ReportRow], path: str | Path) -> None:
    """Static accuracy-by-model chart with a log-scale training-size line."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    phenomena = sorted({row.phenomenon for row in rows})
    models: list[str] = []
    for row in rows:  # already size-ordered
        if row.model_id not in models:
            models.append(row.model_id)
    x = range(len(models))
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(models)), 4))
    width = 0.8 / max(1, len(phenomena))
    for j, phen in enumerate(phenomena):
        acc = {row.model_id: row.mean_accuracy for row in rows if row.phenomenon == phen}
        ax.bar(
            [i + j * width for i in x],
            [acc.get(m, 0.0) for m in models],
            width=width,
            label=phen,
        )
    ax.set_ylabel("accuracy")
    ax.set_ylim(0, 1)
    ax.set_xticks([i + 0.4 for i in x])
    ax.set_xticklabels(models, rotation=30, ha="right")
    sizes = {row.model_id: row.training_tokens for row in rows}
    ax2 = ax.twinx()
    ax2.plot(
        [i + 0.4 for i in x],
        [sizes[m] for m in models],
        color="black",
        marker="o",
        label="training tokens",
    )
    ax2.set_yscale("log")
    ax2.set_ylabel("training tokens (log scale)")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(str(path))
    plt.close(fig)


def render_curves_svg(curves, path: str | Path) -> None:
    """Validation-perplexity learning curves on one axes."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for curve in curves:
        ax.plot(
            [p.batch_index for p in curve.points],
            [p.perplexity for p in curve.points],
            label=curve.label,
        )
    ax.set_xlabel("training batches")
    ax.set_ylabel("validation perplexity")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(str(path))
    plt.close(fig)
