from __future__ import annotations

import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def grafting_trees():
    from concise.conllu import parse_conllu

    text = (FIXTURES / "grafting_trees.conllu").read_text(encoding="utf-8")
    return parse_conllu(text)


@pytest.fixture(scope="session")
def mini_wordnet():
    from concise.wordnet import load_wordnet

    import concise

    data_dir = pathlib.Path(concise.__file__).parent / "data" / "wordnet_mini"
    return load_wordnet(data_dir)
