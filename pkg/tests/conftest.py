import pathlib

import pytest

from descsel.corpus import parse_corpus

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sample_text():
    return (DATA / "sample.corpus").read_text()


@pytest.fixture(scope="session")
def sample_corpus(sample_text):
    return parse_corpus(sample_text)


@pytest.fixture(scope="session")
def sample_dialogue(sample_corpus):
    return sample_corpus.dialogues[0]
