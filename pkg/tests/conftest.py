import random

import pytest

from manymt.detect import CharFreqDetector
from manymt.synthdata import DEMO_LANGS, random_sentence, render, word_list
from manymt.tokenizer import train_subword


def fixture_corpus(lines_per_lang=300, seed=11):
    rng = random.Random(seed)
    return {
        lang: [render(lang, random_sentence(rng)) for _ in range(lines_per_lang)]
        for lang in DEMO_LANGS
    }


@pytest.fixture(scope="session")
def six_lang_corpus():
    return fixture_corpus()


@pytest.fixture(scope="session")
def fixture_tokenizer(six_lang_corpus):
    return train_subword(six_lang_corpus, alpha=0.3, vocab_size=700)


@pytest.fixture(scope="session")
def fixture_detector(six_lang_corpus):
    return CharFreqDetector.train(six_lang_corpus)


@pytest.fixture(scope="session")
def word_tables():
    return {lang: word_list(lang) for lang in DEMO_LANGS}
