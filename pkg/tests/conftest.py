import pytest

from penrec.config import Config
from penrec.corpus import CorpusItem
from penrec.hmm import Lexicon
from penrec.recognizer import train_system
from penrec.synth import default_alphabet, generate_word_corpus, make_lexicon, synth_generate


def items_from(generated):
    return [
        CorpusItem(
            trace=g.trace,
            label=g.trace.label,
            char_ids=g.char_ids,
            spans=[(s.char_id, s.t0, s.t1, s.delayed) for s in g.spans],
        )
        for g in generated
    ]


@pytest.fixture(scope="session")
def small_config():
    return Config.load(overrides=["mlp.epochs=40", "vq.size=64"])


@pytest.fixture(scope="session")
def alphabet_specs():
    return default_alphabet(jitter=0.05)


@pytest.fixture(scope="session")
def alphabet(alphabet_specs):
    return [s.label for s in alphabet_specs]


@pytest.fixture(scope="session")
def small_train_items(alphabet_specs):
    return items_from(synth_generate(alphabet_specs, per_class=8, seed=1))


@pytest.fixture(scope="session")
def small_lexicon():
    return Lexicon.uniform(make_lexicon(30, 10, seed=5))


@pytest.fixture(scope="session")
def small_word_items(alphabet_specs, small_lexicon):
    entries = [(w, ids) for w, ids in small_lexicon.entries.items()]
    return items_from(generate_word_corpus(alphabet_specs, entries, 30, seed=123))


@pytest.fixture(scope="session")
def small_model(small_train_items, alphabet, small_config, small_lexicon):
    return train_system(
        small_train_items, alphabet, small_config, variant="hybrid",
        lexicon=small_lexicon, seed=0,
    )
