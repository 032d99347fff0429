"""Bundled lexical tables: irregular forms, word frequency, verb transitivity."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

__all__ = [
    "irregular_verb_forms",
    "irregular_noun_plurals",
    "form_to_lemma",
    "common_words",
    "verb_transitivity",
]


def _read(name: str) -> str:
    return resources.files("concise.data").joinpath(name).read_text("utf-8")


@lru_cache(maxsize=1)
def _irregular() -> dict:
    return json.loads(_read("irregular_forms.json"))


def irregular_verb_forms() -> dict[str, dict[str, str]]:
    return _irregular()["verbs"]


def irregular_noun_plurals() -> dict[str, str]:
    return _irregular()["noun_plurals"]


@lru_cache(maxsize=1)
def form_to_lemma() -> dict[str, str]:
    """Reverse map from any listed irregular form to its lemma."""
    table = _irregular()
    out: dict[str, str] = {}
    for lemma, forms in table["verbs"].items():
        for form in forms.values():
            out.setdefault(form, lemma)
    for lemma, forms in table["verb_extra_forms"].items():
        for form in forms:
            out.setdefault(form, lemma)
    for singular, plural in table["noun_plurals"].items():
        out.setdefault(plural, singular)
    return out


@lru_cache(maxsize=1)
def common_words() -> tuple[str, ...]:
    """Most-common-first word list; membership rank gates target selection."""
    return tuple(
        w.strip() for w in _read("wordfreq.txt").splitlines() if w.strip()
    )


@lru_cache(maxsize=1)
def verb_transitivity() -> dict[str, str]:
    """verb lemma -> "transitive" or "intransitive:<preposition>"."""
    return json.loads(_read("verb_transitivity.json"))
