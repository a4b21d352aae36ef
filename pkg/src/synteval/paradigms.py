"""Built-in phenomenon grammars and dataset generation.

Three paradigm families ship as data files: across-the-board movement
(``atb``), parasitic gaps (``pg``), and that-trace effects (``tte``).
``generate_dataset`` draws a reproducible sample of distinct minimal-pair
records from a grammar's choice space and ``write_dataset``/``read_dataset``
round-trip them through JSON Lines.
"""

from __future__ import annotations

import json
import random
from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Iterable

from .grammar import (
    GrammarError,
    GrammarSpec,
    MinimalPairRecord,
    ParadigmInstance,
    choice_space,
    enumerate_paradigms,
    parse_grammar,
    sample_paradigm,
)

PHENOMENA = ("atb", "pg", "tte")

# Above this assignment-space size the sampler switches from exhaustive
# enumeration to rejection sampling over record indices.
EXACT_ENUMERATION_LIMIT = 1_000_000

_GRAMMAR_CACHE: dict[str, GrammarSpec] = {}


def builtin_grammar(phenomenon: str) -> GrammarSpec:
    phenomenon = phenomenon.lower()
    if phenomenon not in PHENOMENA:
        raise ValueError(f"unknown phenomenon {phenomenon!r}; expected one of {PHENOMENA}")
    if phenomenon not in _GRAMMAR_CACHE:
        source = (
            resources.files("synteval")
            .joinpath(f"grammars/{phenomenon}.grammar")
            .read_text(encoding="utf-8")
        )
        _GRAMMAR_CACHE[phenomenon] = parse_grammar(source, name=phenomenon)
    return _GRAMMAR_CACHE[phenomenon]


def _resolve(phenomenon: str | GrammarSpec) -> GrammarSpec:
    if isinstance(phenomenon, GrammarSpec):
        return phenomenon
    return builtin_grammar(phenomenon)


def _dedup_key(record: MinimalPairRecord) -> tuple:
    return tuple(inst.tokens for inst in record.instances.values())


# Distinct-record enumerations keyed by grammar identity; sampling differs per
# seed but the underlying enumeration never does.
_DISTINCT_CACHE: dict[int, tuple[GrammarSpec, list[MinimalPairRecord]]] = {}


def _distinct_records(grammar: GrammarSpec) -> list[MinimalPairRecord]:
    entry = _DISTINCT_CACHE.get(id(grammar))
    if entry is not None and entry[0] is grammar:
        return entry[1]
    seen: set[tuple] = set()
    distinct: list[MinimalPairRecord] = []
    for record in enumerate_paradigms(grammar):
        key = _dedup_key(record)
        if key not in seen:
            seen.add(key)
            distinct.append(record)
    _DISTINCT_CACHE[id(grammar)] = (grammar, distinct)
    return distinct


def generate_dataset(
    phenomenon: str | GrammarSpec, n: int, seed: int
) -> list[MinimalPairRecord]:
    """n distinct records (keyed by token sequences), deterministic in seed.

    Distinctness is over rendered sentences, not choice assignments: two
    assignments that differ only in a choice hidden by a structural
    alternative collapse into one record.
    """
    grammar = _resolve(phenomenon)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    space = choice_space(grammar)
    if n > space:
        raise ValueError(
            f"requested {n} records but grammar {grammar.name!r} has only "
            f"{space} choice assignments"
        )
    rng = random.Random(f"{grammar.name}:{seed}:dataset")

    if space <= EXACT_ENUMERATION_LIMIT:
        distinct = _distinct_records(grammar)
        if n > len(distinct):
            raise ValueError(
                f"requested {n} records but grammar {grammar.name!r} generates only "
                f"{len(distinct)} distinct pair tuples"
            )
        sample = rng.sample(distinct, n)
        return [
            replace(rec, seed=seed, shared_choices=dict(rec.shared_choices))
            for rec in sample
        ]

    # Large space: draw records until n distinct token tuples are collected.
    seen: set[tuple] = set()
    out: list[MinimalPairRecord] = []
    index = 0
    budget = 100 * n + 10_000
    while len(out) < n:
        if index >= budget:
            raise GrammarError(
                f"could not collect {n} distinct records from grammar "
                f"{grammar.name!r} after {index} draws ({len(out)} found)"
            )
        record = sample_paradigm(grammar, seed, index)
        index += 1
        key = _dedup_key(record)
        if key in seen:
            continue
        seen.add(key)
        out.append(record)
    return out


def restrict_target_vocabulary(
    grammar: GrammarSpec, vocabulary: Iterable[str]
) -> GrammarSpec:
    """Drop critical-region alternatives whose token falls outside ``vocabulary``.

    Scorers reject out-of-vocabulary targets outright, so filtering the
    grammar first keeps datasets scoreable while leaving every other
    alternative untouched.
    """
    vocab = set(vocabulary)
    critical_nts = set()
    for alts in grammar.rules.values():
        for alt in alts:
            for sym in alt.symbols:
                if not sym.critical:
                    continue
                if sym.nonterminal:
                    critical_nts.add(sym.text)
                elif sym.text not in vocab:
                    raise GrammarError(
                        f"critical literal {sym.text!r} does not survive the "
                        "vocabulary filter"
                    )
    new_rules: dict[str, tuple] = {}
    for nt, alts in grammar.rules.items():
        if nt in critical_nts:
            kept = tuple(
                alt for alt in alts if alt.symbols[0].text.split()[0] in vocab
            )
            if not kept:
                raise GrammarError(
                    f"no alternative of critical nonterminal <{nt}> survives the "
                    "vocabulary filter"
                )
            new_rules[nt] = kept
        else:
            new_rules[nt] = alts
    filtered = GrammarSpec(
        name=grammar.name,
        start=grammar.start,
        rules=new_rules,
        conditions=grammar.conditions,
        criterion=grammar.criterion,
    )
    from .grammar import validate_grammar

    validate_grammar(filtered)
    return filtered


# --- JSON Lines dataset files ------------------------------------------------


def record_to_dict(record: MinimalPairRecord) -> dict:
    return {
        "phenomenon": record.phenomenon,
        "seed": record.seed,
        "criterion": list(record.criterion) if record.criterion else None,
        "shared_choices": record.shared_choices,
        "conditions": {
            label: {
                "tokens": list(inst.tokens),
                "critical_index": inst.critical_span[0],
                "spillover_start": None
                if inst.spillover_span is None
                else inst.spillover_span[0],
                "grammatical": inst.grammatical,
            }
            for label, inst in record.instances.items()
        },
    }


def record_from_dict(data: dict) -> MinimalPairRecord:
    instances = {}
    for label, inst in data["conditions"].items():
        tokens = tuple(inst["tokens"])
        ci = inst["critical_index"]
        ss = inst["spillover_start"]
        instances[label] = ParadigmInstance(
            condition=label,
            tokens=tokens,
            critical_span=(ci, ci + 1),
            spillover_span=None if ss is None else (ss, len(tokens)),
            grammatical=inst["grammatical"],
        )
    criterion = data.get("criterion")
    return MinimalPairRecord(
        phenomenon=data["phenomenon"],
        seed=data["seed"],
        instances=instances,
        shared_choices=dict(data.get("shared_choices", {})),
        criterion=tuple(criterion) if criterion else None,
    )


def write_dataset(records: Iterable[MinimalPairRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), ensure_ascii=False) + "\n")


def read_dataset(path: str | Path) -> list[MinimalPairRecord]:
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(record_from_dict(json.loads(line)))
    return records
