#!/usr/bin/env python3
"""Ease-of-learning comparison across corpus perturbations.

Builds every perturbed variant of a baseline corpus (markers shared between
each perturbation and its control via the seed), trains an incremental n-gram
learner on each, tracks validation perplexity, truncates all curves to the
shortest run, and writes a combined CSV plus a chart.

Feed a real tokenized corpus with --train/--valid/--tags, or run --synthetic
for a quick self-contained demo.

    python scripts/run_perturbation_curves.py --synthetic --outdir curves/
"""

import argparse
import random
from pathlib import Path

from synteval.corpus import Corpus, load_corpus, load_tagged_corpus
from synteval.ngram import align_curves, learning_curve, write_curves_csv
from synteval.perturb import perturb_corpus, pick_marker
from synteval.report import render_curves_svg


def synthetic_pair(n_train: int = 4000, n_valid: int = 400):
    """A corpus with mild word-order structure, so reversals actually hurt."""
    rng = random.Random(7)
    subjects = ["birds", "dogs", "foxes", "crows", "mice"]
    verbs = ["chase", "watch", "follow", "avoid"]
    objects = ["cats", "cars", "kites", "shadows", "trains"]
    tails = ["quietly.", "quickly.", "today.", "at dusk."]

    def sentence():
        words = [rng.choice(subjects), rng.choice(verbs), "the", rng.choice(objects)]
        words += rng.choice(tails).split()
        return tuple(words)

    train = Corpus(tuple(sentence() for _ in range(n_train)))
    valid = Corpus(tuple(sentence() for _ in range(n_valid)), "validation")
    tagging = {v: "VERB" for v in verbs}

    def tag(corpus):
        return tuple(
            tuple((tok, tagging.get(tok, "NOUN")) for tok in sent)
            for sent in corpus.sentences
        )

    return train, valid, tag(train), tag(valid)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--train")
    parser.add_argument("--valid")
    parser.add_argument("--tags", help="tagged TSV aligned with --train")
    parser.add_argument("--valid-tags", help="tagged TSV aligned with --valid")
    parser.add_argument("--synthetic", action="store_true")
    parser.add_argument("--outdir", default="curves")
    parser.add_argument("--order", type=int, default=3)
    parser.add_argument("--k", type=float, default=0.5)
    parser.add_argument("--chunk", type=int, default=10)
    parser.add_argument("--eval-every", type=int, default=20)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    if args.synthetic:
        train, valid, train_tags, valid_tags = synthetic_pair()
    else:
        if not (args.train and args.valid):
            parser.error("--train and --valid are required without --synthetic")
        train = load_corpus(args.train, "train")
        valid = load_corpus(args.valid, "validation")
        train_tags = load_tagged_corpus(args.tags) if args.tags else None
        valid_tags = load_tagged_corpus(args.valid_tags) if args.valid_tags else None

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    variants = {"no_perturb": (train, valid)}
    for name in ("reverse_control", "partial_reverse", "full_reverse", "switch_indices"):
        variants[name] = (
            perturb_corpus(train, name, seed=args.seed),
            perturb_corpus(valid, name, seed=args.seed),
        )
    if train_tags is not None and valid_tags is not None:
        marker = pick_marker(train.vocabulary() | valid.vocabulary()).surface
        for name in ("no_hop", "token_hop"):
            variants[name] = (
                perturb_corpus(train, name, marker=marker, tagged=train_tags),
                perturb_corpus(valid, name, marker=marker, tagged=valid_tags),
            )
    else:
        print("no tagged corpora given: skipping no_hop/token_hop")

    curves = []
    for label, (tr, va) in variants.items():
        curve = learning_curve(
            tr, va, order=args.order, k=args.k,
            chunk=args.chunk, eval_every=args.eval_every, label=label,
        )
        curves.append(curve)
        print(f"{label:<16} {len(curve.points)} points, "
              f"final perplexity {curve.points[-1].perplexity:.2f}")

    aligned = align_curves(curves)
    write_curves_csv(aligned, outdir / "curves.csv")
    render_curves_svg(aligned, outdir / "curves.svg")
    print(f"\nwrote {outdir / 'curves.csv'} and curves.svg")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
