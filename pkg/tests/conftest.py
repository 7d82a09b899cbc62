import os

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")
FIXTURES = os.path.join(DATA, "fixtures")
CONFIGS = os.path.join(DATA, "configs")


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def configs_dir():
    return CONFIGS


@pytest.fixture(scope="session")
def lexicon():
    from ccgmwe.treebank import read_lexicon
    return read_lexicon(os.path.join(DATA, "lexicon.tsv"))


@pytest.fixture(scope="session")
def corpus():
    from ccgmwe.treebank import read_treebank
    return read_treebank(os.path.join(DATA, "treebank.txt"))


@pytest.fixture(scope="session")
def worked_example_tokens():
    from ccgmwe.treebank import read_tokens
    return read_tokens(os.path.join(FIXTURES, "worked_example.tokens"))[0]
