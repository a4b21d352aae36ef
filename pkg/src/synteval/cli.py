"""Command-line entry points.

    synteval generate --phenomenon atb --n 10000 --seed 1 --out atb.jsonl
    synteval perturb --in train.txt --perturbation partial_reverse --seed 7 --out out.txt
    synteval cap-vocab --in train.txt --k 50000 --out capped.txt
    synteval train-ngram --train train.txt --order 3 --k 1 --out model.json
    synteval score --dataset atb.jsonl --scorer ngram:model.json --out scores.csv
    synteval perplexity-curve --train a.txt --valid b.txt --label base --out curve.csv
    synteval serve --model model.json [--tcp 9000]
    synteval report --scores gpt2=scores.csv --builtin-ledger --out report.csv
"""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from pathlib import Path

from . import corpus as corpus_mod
from . import ngram as ngram_mod
from . import paradigms, perturb, protocol, report as report_mod, scoring


def _parse_seeds(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def make_scorer(spec: str) -> scoring.Scorer:
    """ngram:PATH, remote:HOST:PORT, or cmd:SHELL words for a child process."""
    kind, _, rest = spec.partition(":")
    if kind == "ngram":
        return ngram_mod.load_model(rest)
    if kind == "remote":
        host, _, port = rest.rpartition(":")
        client = protocol.ScorerClient.connect(host or "127.0.0.1", int(port))
        return protocol.RemoteScorer(client)
    if kind == "cmd":
        import shlex

        client = protocol.ScorerClient.spawn(shlex.split(rest))
        return protocol.RemoteScorer(client)
    raise ValueError(f"unknown scorer spec {spec!r} (expected ngram:|remote:|cmd:)")


def cmd_generate(args: argparse.Namespace) -> int:
    records = paradigms.generate_dataset(args.phenomenon, args.n, args.seed)
    paradigms.write_dataset(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_perturb(args: argparse.Namespace) -> int:
    source = corpus_mod.load_corpus(args.infile)
    tagged = corpus_mod.load_tagged_corpus(args.tags) if args.tags else None
    marker: str | None
    if args.marker == "auto":
        marker = perturb.pick_marker(source.vocabulary()).surface
        print(f"auto-selected marker {marker!r}")
    else:
        marker = args.marker
    result = perturb.perturb_corpus(
        source, args.perturbation, marker=marker, seed=args.seed, tagged=tagged
    )
    corpus_mod.save_corpus(result, args.out)
    print(f"wrote {result.token_count} tokens to {args.out}")
    return 0


def cmd_cap_vocab(args: argparse.Namespace) -> int:
    source = corpus_mod.load_corpus(args.infile)
    if args.rank_from:
        vocab = corpus_mod.top_k_vocabulary(corpus_mod.load_corpus(args.rank_from), args.k)
        capped = corpus_mod.cap_vocabulary(source, args.k, vocabulary=vocab)
    else:
        capped = corpus_mod.cap_vocabulary(source, args.k)
    corpus_mod.save_corpus(capped, args.out)
    print(f"wrote {capped.token_count} tokens to {args.out}")
    return 0


def cmd_train_ngram(args: argparse.Namespace) -> int:
    train = corpus_mod.load_corpus(args.train)
    model = ngram_mod.train_ngram(train, args.order, args.k, model_id=args.model_id)
    ngram_mod.save_model(model, args.out)
    print(f"trained {model.scorer_id} on {train.token_count} tokens; saved to {args.out}")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    scorer = make_scorer(args.scorer)
    if args.dataset:
        records = paradigms.read_dataset(args.dataset)
        if not records:
            print(f"dataset {args.dataset} is empty", file=sys.stderr)
            return 1
        wanted = set(_parse_seeds(args.seeds)) if args.seeds else None
        by_seed: dict[int, list] = defaultdict(list)
        for record in records:
            if wanted is None or record.seed in wanted:
                by_seed[record.seed].append(record)
        if not by_seed:
            print("no records matched the requested seeds", file=sys.stderr)
            return 1
        rows = []
        seed_accuracies = {}
        phenomenon = records[0].phenomenon
        for seed in sorted(by_seed):
            batch = by_seed[seed]
            ids = [f"{phenomenon}:{seed}:{i:05d}" for i in range(len(batch))]
            outcomes = scoring.evaluate_dataset(batch, scorer, ids)
            seed_accuracies[seed] = scoring.accuracy(outcomes)
            rows.extend(
                (o.pair_id, seed, o.p_grammatical, o.p_ungrammatical, int(o.success))
                for o in outcomes
            )
        scoring.write_outcomes_csv(rows, args.out)
        acc_report = scoring.AccuracyReport(phenomenon, scorer.scorer_id, seed_accuracies)
    else:
        acc_report = scoring.run_evaluation(
            args.phenomenon, scorer, _parse_seeds(args.seeds or "1"), args.n, out_csv=args.out
        )
    for seed, acc in sorted(acc_report.seed_accuracies.items()):
        print(f"seed {seed}: accuracy {acc:.4f}")
    print(f"mean accuracy {acc_report.mean_accuracy:.4f} ({acc_report.scorer_id})")
    return 0


def cmd_perplexity_curve(args: argparse.Namespace) -> int:
    train = corpus_mod.load_corpus(args.train, "train")
    valid = corpus_mod.load_corpus(args.valid, "validation")
    curve = ngram_mod.learning_curve(
        train,
        valid,
        order=args.order,
        k=args.k,
        chunk=args.chunk,
        eval_every=args.eval_every,
        label=args.label,
    )
    ngram_mod.write_curves_csv([curve], args.out)
    print(f"wrote {len(curve.points)} points to {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    model = ngram_mod.load_model(args.model)
    if args.tcp:
        protocol.serve_tcp(model, args.tcp, vocabulary=model.vocabulary)
    else:
        protocol.serve(
            model, sys.stdin.buffer, sys.stdout.buffer, vocabulary=model.vocabulary
        )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    ledger: dict[str, report_mod.ModelLedgerEntry] = {}
    if args.builtin_ledger:
        ledger.update(report_mod.reference_ledger())
    if args.ledger:
        import json

        for model_id, tokens in json.loads(Path(args.ledger).read_text()).items():
            ledger[model_id] = report_mod.ModelLedgerEntry(model_id, int(tokens))
    reports = []
    for spec in args.scores:
        model_id, _, path = spec.partition("=")
        if not path:
            raise ValueError(f"--scores needs MODEL_ID=PATH, got {spec!r}")
        rows = scoring.read_outcomes_csv(path)
        if not rows:
            print(f"score file {path} is empty", file=sys.stderr)
            return 1
        by_seed: dict[int, list[int]] = defaultdict(list)
        phenomenon = rows[0][0].split(":")[0]
        for pair_id, seed, _, _, success in rows:
            by_seed[seed].append(success)
        reports.append(
            scoring.AccuracyReport(
                phenomenon,
                model_id,
                {seed: sum(v) / len(v) for seed, v in by_seed.items()},
            )
        )
    rows_out = report_mod.emit_report(reports, ledger, args.out, out_svg=args.svg)
    for row in rows_out:
        print(
            f"{row.model_id:<24} {row.phenomenon:<6} {row.training_tokens:>14,} "
            f"({row.human_equivalent:>12}) accuracy {row.mean_accuracy:.4f}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synteval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a minimal-pair dataset from a built-in grammar")
    p.add_argument("--phenomenon", required=True, choices=paradigms.PHENOMENA)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("perturb", help="apply a corpus perturbation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--tags", help="token<TAB>UPOS TSV, required for hop perturbations")
    p.add_argument("--perturbation", required=True, choices=perturb.PERTURBATIONS)
    p.add_argument("--marker", default="auto", help="marker token, or 'auto'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("cap-vocab", help="replace rare tokens with <unk>")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rank-from", help="corpus whose frequencies define the top-k (e.g. the train split)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cap_vocab)

    p = sub.add_parser("train-ngram", help="train and save an n-gram model")
    p.add_argument("--train", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--model-id")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_ngram)

    p = sub.add_parser("score", help="evaluate minimal pairs with a scorer")
    p.add_argument("--dataset", help="JSONL dataset; alternatively use --phenomenon/--n")
    p.add_argument("--phenomenon", choices=paradigms.PHENOMENA)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--scorer", required=True, help="ngram:PATH | remote:HOST:PORT | cmd:COMMAND")
    p.add_argument("--seeds", help="comma-separated, e.g. 1,2,3,4,5")
    p.add_argument("--out", required=True, help="per-pair CSV output")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("perplexity-curve", help="incremental training with perplexity tracking")
    p.add_argument("--train", required=True)
    p.add_argument("--valid", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--chunk", type=int, default=10, help="sentences per batch")
    p.add_argument("--eval-every", type=int, default=200, help="batches between evaluations")
    p.add_argument("--label", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_perplexity_curve)

    p = sub.add_parser("serve", help="serve a saved n-gram model over the scorer protocol")
    p.add_argument("--model", required=True)
    p.add_argument("--tcp", type=int, help="listen on this TCP port instead of stdio")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="aggregate score CSVs into an accuracy-by-model table")
    p.add_argument("--scores", nargs="+", required=True, metavar="MODEL_ID=CSV")
    p.add_argument("--ledger", help="JSON file mapping model id to training tokens")
    p.add_argument("--builtin-ledger", action="store_true")
    p.add_argument("--svg", help="also render a chart")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
