import json

import pytest

from synteval.cli import main
from synteval.corpus import load_corpus, save_corpus, save_tagged_corpus
from synteval.ngram import read_curves_csv
from synteval.paradigms import read_dataset
from synteval.report import read_report_csv
from synteval.scoring import read_outcomes_csv

from conftest import synthetic_corpus, synthetic_tagged


@pytest.fixture()
def workdir(tmp_path):
    return tmp_path


def test_generate_and_score_pipeline(workdir, capsys):
    dataset = workdir / "tte.jsonl"
    assert main(["generate", "--phenomenon", "tte", "--n", "300", "--seed", "1", "--out", str(dataset)]) == 0
    records = read_dataset(dataset)
    assert len(records) == 300

    # train a model on the rendered dataset text so every target is in vocabulary
    train_txt = workdir / "train.txt"
    lines = []
    for record in records:
        for inst in record.instances.values():
            lines.append(" ".join(inst.tokens))
    train_txt.write_text("\n".join(lines) + "\n", encoding="utf-8")

    model_path = workdir / "model.json"
    assert main(["train-ngram", "--train", str(train_txt), "--order", "2", "--out", str(model_path)]) == 0

    scores = workdir / "scores.csv"
    assert main(["score", "--dataset", str(dataset), "--scorer", f"ngram:{model_path}", "--out", str(scores)]) == 0
    rows = read_outcomes_csv(scores)
    assert len(rows) == 300
    out = capsys.readouterr().out
    assert "mean accuracy" in out

    report_csv = workdir / "report.csv"
    ledger = workdir / "ledger.json"
    ledger.write_text(json.dumps({"ngram2-k1": 1_000_000}))
    assert main([
        "report", "--scores", f"ngram2-k1={scores}", "--ledger", str(ledger),
        "--out", str(report_csv),
    ]) == 0
    table = read_report_csv(report_csv)
    assert len(table) == 1
    assert table[0].phenomenon == "tte"


def test_score_regenerates_with_seeds(workdir):
    # engineered corpus: build model whose vocabulary covers atb targets
    records_lines = []
    from synteval.paradigms import generate_dataset

    for record in generate_dataset("atb", 100, 1):
        for inst in record.instances.values():
            records_lines.append(" ".join(inst.tokens))
    train_txt = workdir / "t.txt"
    train_txt.write_text("\n".join(records_lines) + "\n", encoding="utf-8")
    model_path = workdir / "m.json"
    main(["train-ngram", "--train", str(train_txt), "--order", "2", "--out", str(model_path)])
    scores = workdir / "s.csv"
    assert main([
        "score", "--phenomenon", "atb", "--n", "50", "--seeds", "1,2",
        "--scorer", f"ngram:{model_path}", "--out", str(scores),
    ]) == 0
    rows = read_outcomes_csv(scores)
    assert len(rows) == 100
    assert {seed for _, seed, *_ in rows} == {1, 2}


def test_perturb_cli_with_auto_marker(workdir):
    corpus = synthetic_corpus(50, seed=3)
    src = workdir / "c.txt"
    save_corpus(corpus, src)
    out = workdir / "p.txt"
    assert main([
        "perturb", "--in", str(src), "--perturbation", "partial_reverse",
        "--seed", "5", "--out", str(out),
    ]) == 0
    result = load_corpus(out)
    assert result.token_count == corpus.token_count + len(corpus.sentences)
    assert all("v" in sent for sent in result.sentences)


def test_perturb_cli_hop_requires_tags(workdir):
    tagged = synthetic_tagged(30, seed=4)
    tags_path = workdir / "c.tsv"
    save_tagged_corpus(tagged, tags_path)
    src = workdir / "c.txt"
    from synteval.corpus import strip_tags

    save_corpus(strip_tags(tagged), src)
    out = workdir / "hop.txt"
    assert main([
        "perturb", "--in", str(src), "--tags", str(tags_path),
        "--perturbation", "token_hop", "--marker", "v", "--out", str(out),
    ]) == 0
    hopped = load_corpus(out)
    verbs = sum(tag == "VERB" for sent in tagged for _, tag in sent)
    assert hopped.token_count == sum(len(s) for s in tagged) + verbs


def test_cap_vocab_cli(workdir):
    src = workdir / "c.txt"
    src.write_text("a a a b b c\n", encoding="utf-8")
    out = workdir / "capped.txt"
    assert main(["cap-vocab", "--in", str(src), "--k", "2", "--out", str(out)]) == 0
    assert out.read_text() == "a a a b b <unk>\n"


def test_perplexity_curve_cli(workdir):
    train = synthetic_corpus(200, seed=6)
    valid = synthetic_corpus(40, seed=7, split="validation")
    train_p, valid_p = workdir / "train.txt", workdir / "valid.txt"
    save_corpus(train, train_p)
    save_corpus(valid, valid_p)
    out = workdir / "curve.csv"
    assert main([
        "perplexity-curve", "--train", str(train_p), "--valid", str(valid_p),
        "--order", "2", "--chunk", "5", "--eval-every", "4",
        "--label", "demo", "--out", str(out),
    ]) == 0
    curves = read_curves_csv(out)
    assert len(curves) == 1
    assert curves[0].label == "demo"
    assert len(curves[0].points) == 10
