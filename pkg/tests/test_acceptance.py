"""Acceptance suite: one test per release criterion, each printing a PASS/FAIL
line (run with ``pytest -s tests/test_acceptance.py`` to watch them stream).
Stated runtime budgets are asserted alongside the functional checks.
"""

import math
import sys
import time
from contextlib import contextmanager

from synteval.corpus import Corpus, strip_tags
from synteval.grammar import choice_space, enumerate_paradigms, sample_paradigm
from synteval.ngram import NGramModel, learning_curve, load_model, perplexity, save_model, train_ngram
from synteval.paradigms import builtin_grammar, generate_dataset
from synteval.perturb import (
    REVERSE_MARKER,
    full_reverse,
    no_hop,
    partial_reverse,
    perturb_corpus,
    reverse_control,
    switch_indices,
    token_hop,
    verify_paired_counts,
)
from synteval.protocol import RemoteScorer, ScorerClient
from synteval.report import human_equivalent
from synteval.scoring import (
    CAUSAL,
    Scorer,
    UniformScorer,
    evaluate_pair,
    run_evaluation,
)

from conftest import engineered_setup, synthetic_corpus, synthetic_tagged
from test_grammar import oracle_pairs, oracle_render, record_key


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL")
        raise
    print(f"[ACCEPTANCE] {name}: PASS")


@contextmanager
def budget(seconds: float):
    start = time.monotonic()
    yield
    elapsed = time.monotonic() - start
    assert elapsed < seconds, f"exceeded {seconds}s budget ({elapsed:.1f}s)"


REV = REVERSE_MARKER


def test_attested_example_transformations():
    with criterion("documented example transformations"), budget(1.0):
        colourless = ("colourless", "green", "ideas", "sleep", "furiously.")
        assert reverse_control(colourless, REV, 2) == (
            "colourless", "green", REV, "ideas", "sleep", "furiously.",
        )
        assert partial_reverse(colourless, REV, 2) == (
            "colourless", "green", REV, "furiously.", "sleep", "ideas",
        )
        assert full_reverse(colourless, REV, 2) == (
            "furiously.", "sleep", "ideas", REV, "green", "colourless",
        )
        assert switch_indices(colourless) == (
            "ideas", "green", "colourless", "sleep", "furiously.",
        )
        sleeping = (
            ("They", "PRON"), ("were", "AUX"), ("sleeping", "VERB"),
            ("next", "ADV"), ("to", "ADP"), ("the", "DET"),
            ("colourless", "ADJ"), ("green", "ADJ"), ("ideas.", "NOUN"),
        )
        assert no_hop(sleeping, "v") == (
            "They", "were", "sleeping", "v", "next", "to", "the",
            "colourless", "green", "ideas.",
        )
        assert token_hop(sleeping, "v") == (
            "They", "were", "sleeping", "next", "to", "the", "v",
            "colourless", "green", "ideas.",
        )


def test_perturbation_algebra():
    with criterion("perturbation algebra over 10,000 sentences"), budget(10.0):
        corpus = synthetic_corpus(10_000, seed=101)
        seed = procseed = 77
        control = perturb_corpus(corpus, "reverse_control", seed=seed)
        partial = perturb_corpus(corpus, "partial_reverse", seed=seed)
        fullrev = perturb_corpus(corpus, "full_reverse", seed=procseed)

        switched = perturb_corpus(corpus, "switch_indices")
        assert perturb_corpus(switched, "switch_indices") == corpus

        for i in range(len(corpus.sentences)):
            ctrl = control.sentences[i]
            assert tuple(reversed(fullrev.sentences[i])) == ctrl
            part = partial.sentences[i]
            at = part.index(REV)
            assert part[:at] + (REV,) + tuple(reversed(part[at + 1 :])) == ctrl


def test_token_count_parity_on_million_token_corpus():
    with criterion("paired token-count parity at 1M tokens"), budget(30.0):
        tagged = synthetic_tagged(120_000, seed=103, min_len=4, max_len=13)
        corpus = strip_tags(tagged)
        assert corpus.token_count >= 1_000_000

        control = perturb_corpus(corpus, "reverse_control", seed=9)
        for name in ("partial_reverse", "full_reverse"):
            report = verify_paired_counts(control, perturb_corpus(corpus, name, seed=9))
            assert report.ok, report.detail

        hop = perturb_corpus(corpus, "token_hop", marker="v", tagged=tagged)
        nohop = perturb_corpus(corpus, "no_hop", marker="v", tagged=tagged)
        report = verify_paired_counts(nohop, hop)
        assert report.ok, report.detail


def test_grammar_enumeration_and_sampling_oracle(
    toy_grammar, toy_four_cell_grammar, toy_singleton_grammar
):
    with criterion("grammar enumeration oracle and sampled-record properties"), budget(60.0):
        toys = [
            toy_grammar,
            toy_four_cell_grammar,
            toy_singleton_grammar,
            engineered_setup()[0],
        ]
        for grammar in toys:
            records = list(enumerate_paradigms(grammar))
            assert len(records) == choice_space(grammar)
            assert {record_key(r) for r in records} == oracle_pairs(grammar)

        per_phenomenon = 50_000 // 3 + 1
        for name in ("atb", "pg", "tte"):
            grammar = builtin_grammar(name)
            good_label, bad_label = grammar.criterion
            for index in range(per_phenomenon):
                record = sample_paradigm(grammar, seed=11, index=index)
                good = record.instance(good_label)
                bad = record.instance(bad_label)
                gi, bi = good.critical_span[0], bad.critical_span[0]
                assert good.tokens[:gi] == bad.tokens[:bi]
                assert good.tokens[gi] != bad.tokens[bi]
                for cond in grammar.conditions:
                    rendered = oracle_render(grammar, cond, record.shared_choices)
                    assert rendered == record.instance(cond.label).tokens


def test_scoring_oracle_engineered_corpus():
    with criterion("engineered-corpus scoring oracle"), budget(30.0):
        grammar, corpus = engineered_setup()
        model = train_ngram(corpus, order=2, k=1)
        report = run_evaluation(grammar, model, seeds=[1, 2, 3, 4, 5], n=1000)
        assert report.mean_accuracy == 1.0
        assert all(acc == 1.0 for acc in report.seed_accuracies.values())

        uniform = run_evaluation(grammar, UniformScorer(13), seeds=[1, 2, 3, 4, 5], n=1000)
        assert uniform.mean_accuracy == 0.0


def test_tte_criterion_wiring():
    with criterion("that-trace criterion evaluates the +that pair"):
        from synteval.scoring import ScoreResult

        class Probe(Scorer):
            mode = CAUSAL
            scorer_id = "probe"

            def __init__(self):
                self.requests = []

            def score_batch(self, requests):
                self.requests.extend(requests)
                return [ScoreResult(-1.0) for _ in requests]

        scorer = Probe()
        for record in generate_dataset("tte", 25, seed=3):
            scorer.requests.clear()
            evaluate_pair(record, scorer)
            good_req, bad_req = scorer.requests
            plus_trace = record.instance("+that+trace")
            minus_trace = record.instance("+that-trace")
            # evaluated quantities are P(-trace | +that) vs P(+trace | +that):
            # same left context ending in the overt complementizer, noun target
            # for the grammatical member, verb target for the ungrammatical one
            assert good_req.left_context == bad_req.left_context
            assert good_req.left_context[-1] == "that"
            assert good_req.target == minus_trace.critical_token
            assert bad_req.target == plus_trace.critical_token
            ci = plus_trace.critical_span[0]
            assert (bad_req.target, good_req.target) == (
                plus_trace.tokens[ci],
                plus_trace.tokens[ci + 1],
            )


def test_ngram_sanity():
    with criterion("n-gram hand oracles, exact uniform perplexity, memorization curve"):
        model = train_ngram(Corpus((("a", "b"), ("a", "c"))), order=2, k=0)
        assert abs(model.probability(("a",), "b") - 0.5) < 1e-12
        assert abs(model.log_prob(("a",), "b") - math.log(0.5)) < 1e-12
        unigram = train_ngram(Corpus((("a", "a", "a", "b"),)), order=1, k=0)
        assert abs(unigram.probability((), "a") - 0.75) < 1e-12

        uniform = NGramModel(2, k=1.0, vocabulary=[f"t{i}" for i in range(10)])
        assert len(uniform.vocabulary) == 12
        valid = Corpus(tuple((f"t{i % 10}",) for i in range(8)), "validation")
        assert perplexity(uniform, valid) == 12.0

        corpus = synthetic_corpus(1000, seed=6)
        curve = learning_curve(corpus, corpus, order=2, k=1, chunk=10, eval_every=10)
        values = [p.perplexity for p in curve.points]
        assert len(values) == 10
        assert all(later <= earlier for earlier, later in zip(values, values[1:]))


def test_human_equivalent_ledger():
    with criterion("human-equivalent exposure ledger"), budget(1.0):
        expected = [
            (8_600_000, "month", 10),
            (8_600_000, "month", 10),  # LSTM and Transformer share the size
            (10_000_000, "year", 1),
            (90_000_000, "year", 8),
            (100_000_000, "year", 9),
            (3_500_000_000, "year", 320),
            (8_000_000_000, "year", 730),
            (9_000_000_000_000, "year", 821_250),
        ]
        for tokens, unit, value in expected:
            he = human_equivalent(tokens)
            assert he.unit == unit, (tokens, he)
            assert abs(he.value - value) / value <= 0.01, (tokens, he)
        assert human_equivalent(30_000).text == "1 day"


def test_protocol_equivalence_ten_thousand_requests(tmp_path):
    with criterion("remote vs in-process scorer equivalence on 10,000 requests"):
        grammar = builtin_grammar("tte")
        nouns = [alt.symbols[0].text for alt in grammar.rules["TARGET_NOUN"]]
        verbs = [alt.symbols[0].text for alt in grammar.rules["TARGET_VERB"]]
        train = Corpus(tuple(("that", word) for word in nouns + verbs))
        model = train_ngram(train, order=2, k=1)
        model_path = tmp_path / "tte-model.json"
        save_model(model, model_path)

        in_process = load_model(model_path)
        seeds = [1, 2, 3, 4, 5]
        local_csv = tmp_path / "local.csv"
        local_report = run_evaluation("tte", in_process, seeds, 1000, out_csv=local_csv)

        client = ScorerClient.spawn(
            [sys.executable, "-m", "synteval.cli", "serve", "--model", str(model_path)]
        )
        try:
            remote = RemoteScorer(client)
            remote_csv = tmp_path / "remote.csv"
            remote_report = run_evaluation("tte", remote, seeds, 1000, out_csv=remote_csv)
        finally:
            client.close()

        # 5 seeds x 1000 pairs x 2 scores = 10,000 served requests
        assert local_csv.read_bytes() == remote_csv.read_bytes()
        assert remote_report == local_report
