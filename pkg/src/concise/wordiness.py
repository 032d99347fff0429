"""Lexicon-driven wordiness detection and the wordy-token fraction.

The detector is precision-oriented: patterns are exact token sequences (with
limited alternation and POS wildcards), so a miss is acceptable but a spurious
class label is not. Spans from one pass may overlap; they are reported, not
merged. The vague-swamp / fancy-words / implied-information classes are
accepted by the lexicon schema but ship with no entries.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .conllu import DepTree
from .textcore import TokenSeq

__all__ = [
    "DETECTABLE_CLASSES",
    "SCHEMA_CLASSES",
    "WordinessSpan",
    "LexiconEntry",
    "WordinessLexicon",
    "load_lexicon",
    "default_lexicon",
    "detect",
    "omega",
    "delete_hint_indices",
]

DETECTABLE_CLASSES = frozenset(
    {
        "running_start",
        "stock_phrase",
        "redundant_pair",
        "expletive_construction",
        "phrasal_verb",
        "nominalization_pattern",
        "qualifier",
        "long_sentence",
        "long_opening",
        "negative_construction",
    }
)

# schema-only classes: valid in lexicon files, shipped empty
SCHEMA_CLASSES = DETECTABLE_CLASSES | {
    "vague_swamp",
    "fancy_words",
    "implied_information",
}

_BE_FORMS = frozenset({"is", "are", "was", "were", "be", "been", "being"})
_CLAUSE_PUNCT = frozenset({",", ";", ":"})

_LONG_SENTENCE_TOKENS = 25
_LONG_OPENING_TOKENS = 8


@dataclass(frozen=True)
class WordinessSpan:
    start: int
    end: int  # half-open
    kind: str
    pattern_id: str

    def indices(self) -> range:
        return range(self.start, self.end)


@dataclass(frozen=True)
class LexiconEntry:
    id: str
    kind: str
    match: tuple[str, ...]
    action: str  # delete | replace | rewrite

    def needs_tree(self) -> bool:
        return any(alt.startswith("POS:") for tok in self.match for alt in _alts(tok))

    def deletable_offsets(self) -> list[int]:
        """Offsets of matched tokens that a delete action would remove."""
        return [i for i, tok in enumerate(self.match) if not tok.startswith("+")]


def _alts(pattern_token: str) -> list[str]:
    return pattern_token.lstrip("+").split("|")


@dataclass(frozen=True)
class WordinessLexicon:
    entries: tuple[LexiconEntry, ...]

    def __post_init__(self):
        for entry in self.entries:
            if entry.kind not in SCHEMA_CLASSES:
                raise ValueError(f"entry {entry.id}: unknown class {entry.kind!r}")
            if not entry.match:
                raise ValueError(f"entry {entry.id}: empty pattern")
            if entry.action not in ("delete", "replace", "rewrite"):
                raise ValueError(f"entry {entry.id}: unknown action {entry.action!r}")


def load_lexicon(path: str | Path) -> WordinessLexicon:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return _lexicon_from_payload(payload)


def _lexicon_from_payload(payload: dict) -> WordinessLexicon:
    entries = tuple(
        LexiconEntry(
            id=e["id"],
            kind=e["class"],
            match=tuple(e["match"]),
            action=e["action"],
        )
        for e in payload["entries"]
    )
    return WordinessLexicon(entries)


_default: WordinessLexicon | None = None


def default_lexicon() -> WordinessLexicon:
    global _default
    if _default is None:
        text = resources.files("concise.data").joinpath("wordiness_lexicon.json").read_text("utf-8")
        _default = _lexicon_from_payload(json.loads(text))
    return _default


def _upos_by_position(tree: DepTree | None) -> list[str] | None:
    if tree is None:
        return None
    return [n.upos for n in sorted(tree.nodes, key=lambda n: n.id)]


def _token_matches(norm: str, upos: str | None, pattern_token: str) -> bool:
    for alt in _alts(pattern_token):
        if alt.startswith("POS:"):
            if upos is not None and upos == alt[4:]:
                return True
        elif norm == alt:
            return True
    return False


def _entry_matches_at(
    entry: LexiconEntry, norms, upos: list[str] | None, start: int
) -> bool:
    if start + len(entry.match) > len(norms):
        return False
    for offset, pattern_token in enumerate(entry.match):
        pos_tag = upos[start + offset] if upos is not None else None
        if not _token_matches(norms[start + offset], pos_tag, pattern_token):
            return False
    return True


def detect(
    sentence: TokenSeq,
    tree: DepTree | None = None,
    lexicon: WordinessLexicon | None = None,
) -> list[WordinessSpan]:
    """All lexicon matches plus the structural running-start/length rules."""
    if lexicon is None:
        lexicon = default_lexicon()
    norms = sentence.norms
    upos = _upos_by_position(tree)
    spans: list[WordinessSpan] = []
    for entry in lexicon.entries:
        if entry.needs_tree() and upos is None:
            continue
        for start in range(len(norms)):
            if _entry_matches_at(entry, norms, upos, start):
                spans.append(
                    WordinessSpan(start, start + len(entry.match), entry.kind, entry.id)
                )

    if len(norms) >= 2 and norms[0] in ("there", "it") and norms[1] in _BE_FORMS:
        expletive_confirmed = True
        if tree is not None:
            first = sorted(tree.nodes, key=lambda n: n.id)[0]
            expletive_confirmed = first.deprel.startswith("expl") or first.upos in (
                "PRON",
                "EX",
                "ADV",
            )
        if expletive_confirmed:
            spans.append(WordinessSpan(0, 2, "running_start", "struct:running_start"))

    if len(norms) > _LONG_SENTENCE_TOKENS:
        spans.append(WordinessSpan(0, len(norms), "long_sentence", "struct:long_sentence"))

    boundary = next((i for i, n in enumerate(norms) if n in _CLAUSE_PUNCT), None)
    if boundary is not None and boundary > _LONG_OPENING_TOKENS:
        spans.append(WordinessSpan(0, boundary, "long_opening", "struct:long_opening"))

    return sorted(spans, key=lambda s: (s.start, s.end, s.kind))


def omega(sentence: TokenSeq, spans: list[WordinessSpan]) -> float:
    """Fraction of tokens covered by at least one span (set-union semantics)."""
    if not len(sentence):
        return 0.0
    covered: set[int] = set()
    for span in spans:
        if not (0 <= span.start < span.end <= len(sentence)):
            raise ValueError(f"span [{span.start}, {span.end}) out of bounds")
        covered.update(span.indices())
    return len(covered) / len(sentence)


def delete_hint_indices(
    sentence: TokenSeq,
    tree: DepTree | None = None,
    lexicon: WordinessLexicon | None = None,
) -> set[int]:
    """Token indices a delete-action pattern marks as removable.

    Pattern tokens prefixed with ``+`` are required context and never land in
    this set (for "fell down" only "down" is removable).
    """
    if lexicon is None:
        lexicon = default_lexicon()
    norms = sentence.norms
    upos = _upos_by_position(tree)
    hints: set[int] = set()
    for entry in lexicon.entries:
        if entry.action != "delete":
            continue
        if entry.needs_tree() and upos is None:
            continue
        for start in range(len(norms)):
            if _entry_matches_at(entry, norms, upos, start):
                hints.update(start + off for off in entry.deletable_offsets())
    return hints
