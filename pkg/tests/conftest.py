import random

import pytest

from synteval.corpus import Corpus
from synteval.grammar import parse_grammar

# Small collision-free paradigm grammars: every nonterminal is reachable, no
# nonterminal repeats inside one derivation, and no choice is hidden behind a
# structural alternative, so pair counts equal plain derivation counts.
TOY_PAIR_SOURCE = """
name toy
start S
condition good C=+ grammatical
condition bad  C=- ungrammatical
criterion good > bad
<S> -> <A> <B> <C> ~<SP>
<A> -> 'the' | 'a'
<B> -> 'cat' | 'dog' | 'bird'
<+C> -> *'purrs'
<-C> -> *'barks' <TAIL>
<TAIL> -> 'loudly' | 'often'
<SP> -> 'all day.' | 'all night.'
"""

TOY_FOUR_CELL_SOURCE = """
name toyfour
start S
condition +x+y X=+ Y=+ ungrammatical
condition +x-y X=+ Y=- grammatical
condition -x+y X=- Y=+ grammatical
condition -x-y X=- Y=- grammatical
criterion +x-y > +x+y
<S> -> <LEAD> <X> <Y>
<LEAD> -> 'we saw' | 'they saw'
<+X> -> 'that'
<-X> ->
<+Y> -> *<V> <N>
<-Y> -> *<N> <V>
<N> -> 'birds' | 'fish' | 'deer'
<V> -> 'fly' | 'swim'
"""

TOY_SINGLETON_SOURCE = """
name singleton
start S
condition only C=+ grammatical
<S> -> 'left' <C> ~<SP>
<+C> -> *'mark'
<SP> -> 'tail here.'
"""

WORDS = (
    "river stone cloud meadow forest lantern copper sparrow winter harvest "
    "mountain valley thunder ember willow marble falcon cedar harbor prairie"
).split()


@pytest.fixture(scope="session")
def toy_grammar():
    return parse_grammar(TOY_PAIR_SOURCE)


@pytest.fixture(scope="session")
def toy_four_cell_grammar():
    return parse_grammar(TOY_FOUR_CELL_SOURCE)


@pytest.fixture(scope="session")
def toy_singleton_grammar():
    return parse_grammar(TOY_SINGLETON_SOURCE)


def synthetic_corpus(
    n_sentences: int,
    seed: int = 0,
    min_len: int = 1,
    max_len: int = 12,
    words=WORDS,
    split: str = "train",
) -> Corpus:
    rng = random.Random(seed)
    sentences = tuple(
        tuple(rng.choice(words) for _ in range(rng.randint(min_len, max_len)))
        for _ in range(n_sentences)
    )
    return Corpus(sentences, split)


def synthetic_tagged(n_sentences: int, seed: int = 0, min_len: int = 1, max_len: int = 12):
    """Tagged sentences with a mix of VERB and non-VERB tags."""
    rng = random.Random(seed)
    tags = ("NOUN", "VERB", "ADJ", "ADV", "DET", "VERB")
    out = []
    for _ in range(n_sentences):
        length = rng.randint(min_len, max_len)
        out.append(
            tuple((rng.choice(WORDS), rng.choice(tags)) for _ in range(length))
        )
    return tuple(out)


def engineered_setup():
    """A 1000-pair grammar plus a bigram training corpus built so the
    grammatical continuation follows every anchor token 9x more often than
    the ungrammatical one; any count-based scorer must prefer it on every
    single pair."""
    lines = ["start S",
             "condition good C=+ grammatical",
             "condition bad  C=- ungrammatical",
             "criterion good > bad",
             "<S> -> <P1> <P2> <ANCHOR> <C> ~<SP>",
             "<P1> -> " + " | ".join(f"'p{i}'" for i in range(10)),
             "<P2> -> " + " | ".join(f"'q{i}'" for i in range(10)),
             "<ANCHOR> -> " + " | ".join(f"'b{i}'" for i in range(10)),
             "<+C> -> *'win'",
             "<-C> -> *'lose'",
             "<SP> -> 'the end.'"]
    grammar = parse_grammar("\n".join(lines), name="engineered")
    sentences = []
    for i in range(10):
        sentences.extend([(f"b{i}", "win")] * 9)
        sentences.append((f"b{i}", "lose"))
    return grammar, Corpus(tuple(sentences))
