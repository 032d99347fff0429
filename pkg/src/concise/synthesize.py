"""Wordy-sentence synthesis by gloss grafting, plus multi-source dataset mixing.

Grafting substitutes a content word with the parsed definition of its
disambiguated sense: the target's children move onto the gloss root, the
target leaves the tree, the gloss subtree takes its linear slot (nouns and
verbs) or follows the head post-attributively (adjectives and adverbs), and
inflections are repaired. Glosses are stripped of parenthesized asides before
parsing. All tree surgery ends with a renumbering pass.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .conllu import ConlluError, DepNode, DepTree, tree_mismatches
from .lexdata import (
    common_words,
    irregular_noun_plurals,
    irregular_verb_forms,
    verb_transitivity,
)
from .textcore import TokenSeq, tokenize
from .wordnet import (
    ADJ,
    ADV,
    EIGHT_PATTERNS,
    NOUN,
    VERB,
    Synset,
    WordNetDb,
    lesk_disambiguate,
)

__all__ = [
    "GraftError",
    "GraftJob",
    "SynthesisRecord",
    "MixSource",
    "MixSpec",
    "MixResult",
    "strip_parenthetical",
    "eligible_targets",
    "select_target",
    "graft",
    "graft_with_flags",
    "inflect",
    "filter_synthesis",
    "mix_datasets",
    "synthesize_sentence",
]

_CONTENT_UPOS = {"NOUN": NOUN, "VERB": VERB, "ADJ": ADJ, "ADV": ADV}
_VOWELS = "aeiou"

DEFAULT_FREQ_RANK = 3000


class GraftError(ValueError):
    pass


@dataclass(frozen=True)
class GraftJob:
    sentence_tree: DepTree
    target_index: int  # node id of the word being expanded
    sense: Synset
    gloss_tree: DepTree
    seed: int = 0


@dataclass(frozen=True)
class SynthesisRecord:
    original: str
    inflated: str
    verdict: str  # kept | dropped
    reason: str | None = None  # reparse_mismatch | reparse_accuracy | low_similarity | no_candidate
    similarity: float | None = None
    flags: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        out = {"original": self.original, "inflated": self.inflated, "verdict": self.verdict}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.similarity is not None:
            out["similarity"] = self.similarity
        if self.flags:
            out["flags"] = list(self.flags)
        return out


def strip_parenthetical(text: str) -> str:
    """Drop parenthesized asides; WordNet glosses use them for usage notes."""
    out = re.sub(r"\([^()]*\)", " ", text)
    return re.sub(r"\s+", " ", out).strip()


# ---------------------------------------------------------------------------
# target selection
# ---------------------------------------------------------------------------

def _completes_multiword(tree: DepTree, node: DepNode, db: WordNetDb) -> bool:
    completions = db.multiword_starts.get(node.lemma_or_form())
    if not completions:
        return False
    ordered = sorted(tree.nodes, key=lambda n: n.id)
    pos = next(i for i, n in enumerate(ordered) if n.id == node.id)
    following = [n.lemma_or_form() for n in ordered[pos + 1 :]]
    return any(
        tuple(following[: len(rest)]) == rest for rest in completions if rest
    )


def eligible_targets(
    tree: DepTree,
    db: WordNetDb,
    freq: Sequence[str] | None = None,
    freq_rank: int = DEFAULT_FREQ_RANK,
) -> list[int]:
    """Node ids that qualify for expansion, in word order.

    Eligible: noun/verb/adjective/adverb with at least one sense, not a
    common word (rank within ``freq_rank`` of the frequency list), and not
    the start of a WordNet collocation completed by the following tokens.
    """
    if freq is None:
        freq = common_words()
    rank = {w: i + 1 for i, w in enumerate(freq)}
    out = []
    for node in sorted(tree.nodes, key=lambda n: n.id):
        pos = _CONTENT_UPOS.get(node.upos)
        if pos is None:
            continue
        lemma = node.lemma_or_form()
        r = rank.get(lemma)
        if r is not None and r <= freq_rank:
            continue
        if not db.lookup(lemma, pos):
            continue
        if _completes_multiword(tree, node, db):
            continue
        out.append(node.id)
    return out


def select_target(
    tree: DepTree,
    db: WordNetDb,
    freq: Sequence[str] | None = None,
    seed: int = 0,
    freq_rank: int = DEFAULT_FREQ_RANK,
) -> int | None:
    """Seeded uniform pick among eligible_targets, or None when empty."""
    eligible = eligible_targets(tree, db, freq, freq_rank)
    if not eligible:
        return None
    return random.Random(seed).choice(eligible)


# ---------------------------------------------------------------------------
# inflection
# ---------------------------------------------------------------------------

def _vowel_groups(word: str) -> int:
    return len(re.findall(r"[aeiouy]+", word))


def _double_final(word: str) -> bool:
    return (
        len(word) >= 3
        and word[-1] not in _VOWELS + "wxy"
        and word[-1].isalpha()
        and word[-2] in _VOWELS
        and word[-3] not in _VOWELS
        and _vowel_groups(word) == 1
    )


def inflect(lemma: str, form: str) -> str:
    """Inflect with regular rules after consulting the irregular-form table.

    Forms: gerund, third_singular, past, past_participle, plural, singular.
    """
    verbs = irregular_verb_forms()
    if form in ("gerund", "third_singular", "past", "past_participle"):
        entry = verbs.get(lemma, {})
        if form in entry:
            return entry[form]
        if form == "past_participle" and "past" in entry:
            return entry["past"]
    if form == "plural":
        irregular = irregular_noun_plurals().get(lemma)
        if irregular:
            return irregular
    if form == "singular":
        for singular, plural in irregular_noun_plurals().items():
            if lemma == plural:
                return singular

    if form == "gerund":
        if lemma.endswith("ie"):
            return lemma[:-2] + "ying"
        if lemma.endswith("e") and len(lemma) > 2 and not lemma.endswith(("ee", "oe", "ye")):
            return lemma[:-1] + "ing"
        if _double_final(lemma):
            return lemma + lemma[-1] + "ing"
        return lemma + "ing"
    if form in ("third_singular", "plural"):
        if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in _VOWELS:
            return lemma[:-1] + "ies"
        if lemma.endswith(("s", "x", "z", "ch", "sh", "o")):
            return lemma + "es"
        return lemma + "s"
    if form in ("past", "past_participle"):
        if lemma.endswith("e"):
            return lemma + "d"
        if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in _VOWELS:
            return lemma[:-1] + "ied"
        if _double_final(lemma):
            return lemma + lemma[-1] + "ed"
        return lemma + "ed"
    if form == "singular":
        if lemma.endswith("ies"):
            return lemma[:-3] + "y"
        if lemma.endswith("es") and lemma[:-2].endswith(("s", "x", "z", "ch", "sh")):
            return lemma[:-2]
        if lemma.endswith("s") and not lemma.endswith("ss"):
            return lemma[:-1]
        return lemma
    raise ValueError(f"unknown inflection form {form!r}")


def _detect_verb_form(surface: str, lemma: str) -> str:
    folded = surface.casefold()
    if folded == lemma:
        return "base"
    entry = irregular_verb_forms().get(lemma, {})
    for form_name in ("past_participle", "past", "third_singular", "gerund"):
        if entry.get(form_name) == folded:
            return form_name
    if folded.endswith("ing"):
        return "gerund"
    if folded.endswith("ed"):
        return "past_participle"
    if folded.endswith("s"):
        return "third_singular"
    return "base"


def _is_plural_noun(surface: str, lemma: str) -> bool:
    folded = surface.casefold()
    if irregular_noun_plurals().get(lemma) == folded:
        return True
    return folded != lemma and folded in (
        lemma + "s",
        lemma + "es",
        lemma[:-1] + "ies" if lemma.endswith("y") else "",
    )


# ---------------------------------------------------------------------------
# grafting (Algorithm: copy children, delete target, insert gloss, fix forms)
# ---------------------------------------------------------------------------

@dataclass
class _Rec:
    key: tuple  # ("s"|"g", original id)
    form: str
    lemma: str
    upos: str
    deprel: str
    head_ref: tuple | None  # key of head record, None = root


def graft_with_flags(job: GraftJob) -> tuple[DepTree, frozenset[str]]:
    """Replace the target word's slot with its sense's parsed gloss."""
    tree = job.sentence_tree
    gloss = job.gloss_tree
    u = tree.node(job.target_index)
    gloss_root = gloss.node(gloss.root_id)

    pattern = (job.sense.pos, gloss_root.upos)
    if pattern not in EIGHT_PATTERNS:
        raise GraftError(
            f"unsupported pattern: {pattern[0]} -> {pattern[1]}"
        )

    post_attributive = u.upos not in ("NOUN", "VERB")
    anchor = u.head  # h_u; 0 when the target is the root

    records: dict[tuple, _Rec] = {}
    for node in tree.nodes:
        if node.id == u.id:
            continue
        key = ("s", node.id)
        if node.head == u.id:
            head_ref = ("g", gloss_root.id)  # children move onto the gloss root
        elif node.head == 0:
            head_ref = None
        else:
            head_ref = ("s", node.head)
        records[key] = _Rec(key, node.form, node.lemma, node.upos, node.deprel, head_ref)

    for node in gloss.nodes:
        key = ("g", node.id)
        if node.id == gloss_root.id:
            if anchor == 0:
                head_ref = None
                deprel = "root"
            else:
                head_ref = ("s", anchor)
                deprel = u.deprel
        else:
            head_ref = ("g", node.head)
            deprel = node.deprel
        records[key] = _Rec(key, node.form, node.lemma, node.upos, deprel, head_ref)

    root_key = ("g", gloss_root.id)
    flags: set[str] = set()
    prep_insert: tuple[_Rec, tuple] | None = None

    if u.upos == "NOUN":
        if gloss_root.upos == "VERB":
            records[root_key].form = inflect(gloss_root.lemma_or_form(), "gerund")
        elif _is_plural_noun(u.form, u.lemma_or_form()):
            records[root_key].form = inflect(gloss_root.lemma_or_form(), "plural")
        _drop_duplicate_determiners(records, root_key)
    elif u.upos == "VERB":
        detected = _detect_verb_form(u.form, u.lemma_or_form())
        if detected != "base":
            records[root_key].form = inflect(gloss_root.lemma_or_form(), detected)
        prep_insert, prep_flags = _preposition_fix(records, root_key, gloss_root.lemma_or_form())
        flags |= prep_flags

    # linear order: survivors keep their slots, the gloss occupies the target's
    # slot (or follows the head when post-attributive), gloss-internal order kept
    slot = anchor if post_attributive else u.id

    def sort_key(rec: _Rec):
        kind, num = rec.key
        if kind == "s":
            return (num, 0, 0)
        return (slot, 1, num)

    ordered = sorted(records.values(), key=sort_key)
    if prep_insert is not None:
        prep_rec, before_key = prep_insert
        at = next(i for i, rec in enumerate(ordered) if rec.key == before_key)
        ordered.insert(at, prep_rec)

    new_ids = {rec.key: i + 1 for i, rec in enumerate(ordered)}
    nodes = tuple(
        DepNode(
            id=new_ids[rec.key],
            form=rec.form,
            lemma=rec.lemma,
            upos=rec.upos,
            head=0 if rec.head_ref is None else new_ids[rec.head_ref],
            deprel=rec.deprel,
        )
        for rec in ordered
    )
    try:
        return DepTree(nodes), frozenset(flags)
    except ConlluError as exc:
        raise GraftError(f"graft produced an invalid tree: {exc}") from exc


def graft(job: GraftJob) -> DepTree:
    return graft_with_flags(job)[0]


def _drop_duplicate_determiners(records: dict, root_key: tuple) -> None:
    # only graft-induced duplication is repaired: a gloss-side determiner is
    # dropped when the target's own determiner also moved onto the gloss root
    dets = [
        rec for rec in records.values()
        if rec.head_ref == root_key and (rec.deprel == "det" or rec.upos == "DET")
    ]
    sentence_side = [rec for rec in dets if rec.key[0] == "s"]
    gloss_side = [rec for rec in dets if rec.key[0] == "g"]
    if sentence_side and gloss_side:
        for rec in gloss_side:
            _delete_subtree(records, rec.key)


def _delete_subtree(records: dict, key: tuple) -> None:
    doomed = {key}
    grew = True
    while grew:
        grew = False
        for rec in list(records.values()):
            if rec.key not in doomed and rec.head_ref in doomed:
                doomed.add(rec.key)
                grew = True
    for k in doomed:
        records.pop(k, None)


def _preposition_fix(
    records: dict, root_key: tuple, verb_lemma: str
) -> tuple[tuple[_Rec, tuple] | None, set[str]]:
    """Preposition to insert before the moved object, per verb transitivity."""
    entry = verb_transitivity().get(verb_lemma)
    if entry is None:
        return None, {"transitivity_unknown"}
    objects = [
        rec for rec in records.values()
        if rec.head_ref == root_key and rec.deprel in ("obj", "dobj")
    ]
    if entry.startswith("intransitive:") and objects:
        prep = entry.split(":", 1)[1]
        already_there = any(
            rec.head_ref == root_key and rec.upos == "ADP" and rec.form == prep
            for rec in records.values()
        )
        if already_there:
            return None, set()
        first = min(objects, key=lambda rec: rec.key[1])
        prep_rec = _Rec(("p", 0), prep, prep, "ADP", "case", first.key)
        return (prep_rec, first.key), {"preposition_added"}
    return None, set()


# ---------------------------------------------------------------------------
# post-filters
# ---------------------------------------------------------------------------

def filter_synthesis(
    rec: SynthesisRecord,
    constructed: DepTree,
    reparsed: DepTree,
    similarity: float | None = None,
    *,
    max_mismatches: int = 3,
    min_accuracy: float = 0.9,
    similarity_floor: float = 0.82,
    labeled: bool = True,
) -> SynthesisRecord:
    """Verdict by reparse agreement and semantic similarity.

    Drops when mismatches exceed ``max_mismatches``, when attachment accuracy
    falls below ``min_accuracy``, or when similarity is at or below
    ``similarity_floor`` (the boundary itself is dropped). With no similarity
    score the similarity gate is skipped and the record flagged unfiltered.
    """
    report = tree_mismatches(constructed, reparsed, labeled=labeled)
    if report.mismatches > max_mismatches:
        return replace(rec, verdict="dropped", reason="reparse_mismatch", similarity=similarity)
    if report.accuracy < min_accuracy:
        return replace(rec, verdict="dropped", reason="reparse_accuracy", similarity=similarity)
    if similarity is not None and similarity <= similarity_floor:
        return replace(rec, verdict="dropped", reason="low_similarity", similarity=similarity)
    flags = rec.flags if similarity is not None else rec.flags + ("similarity_unfiltered",)
    return replace(rec, verdict="kept", reason=None, similarity=similarity, flags=flags)


# ---------------------------------------------------------------------------
# sentence pipeline
# ---------------------------------------------------------------------------

def synthesize_sentence(
    tree: DepTree,
    db: WordNetDb,
    gloss_parse: Callable[[Synset], DepTree | None],
    *,
    seed: int = 0,
    rounds: int = 1,
    freq: Sequence[str] | None = None,
    freq_rank: int = DEFAULT_FREQ_RANK,
) -> tuple[DepTree | None, str | None, frozenset[str]]:
    """Run select -> disambiguate -> graft for ``rounds`` passes.

    Returns (tree, None, flags) on success or (None, "no_candidate", flags)
    when no eligible target yields a supported graft.
    """
    current = tree
    flags: set[str] = set()
    for round_no in range(rounds):
        candidates = eligible_targets(current, db, freq, freq_rank)
        if not candidates:
            return (None, "no_candidate", frozenset()) if round_no == 0 else (current, None, frozenset(flags))
        rng = random.Random(seed + round_no)
        rng.shuffle(candidates)
        grafted = None
        for target_id in candidates:
            node = current.node(target_id)
            context = TokenSeq.from_tokens(
                n.form for n in sorted(current.nodes, key=lambda n: n.id) if n.id != target_id
            )
            sense = lesk_disambiguate(
                node.lemma_or_form(), _CONTENT_UPOS[node.upos], context, db
            )
            gloss_tree = gloss_parse(sense)
            if gloss_tree is None:
                continue
            job = GraftJob(current, target_id, sense, gloss_tree, seed=seed)
            try:
                grafted, graft_flags = graft_with_flags(job)
                flags |= graft_flags
                break
            except GraftError:
                continue
        if grafted is None:
            return (None, "no_candidate", frozenset()) if round_no == 0 else (current, None, frozenset(flags))
        current = grafted
    return current, None, frozenset(flags)


# ---------------------------------------------------------------------------
# dataset mixing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixSource:
    name: str
    path: str
    role: str  # paraphrase | compression | simplification | keep_all
    min_words: int = 10
    min_similarity: float = 0.9


@dataclass(frozen=True)
class MixSpec:
    sources: tuple[MixSource, ...]
    shuffle_seed: int = 0


@dataclass
class MixResult:
    pairs: list[tuple[str, str]]
    per_source: dict[str, tuple[int, int]]  # name -> (kept, dropped)


def _read_pairs(source: MixSource) -> list[tuple[str, str]]:
    try:
        with open(source.path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ValueError(f"cannot read mix source {source.name!r}: {exc}") from exc
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(
                f"mix source {source.name!r} line {lineno}: expected 2 tab-separated columns"
            )
        pairs.append((parts[0], parts[1]))
    return pairs


def mix_datasets(
    spec: MixSpec,
    scorer: Callable[[str, str], float] | None = None,
) -> MixResult:
    """Filter each source by its role, pool everything, and shuffle."""
    pooled: list[tuple[str, str]] = []
    per_source: dict[str, tuple[int, int]] = {}
    for source in spec.sources:
        pairs = _read_pairs(source)
        if source.role == "keep_all":
            kept = pairs
        elif source.role == "paraphrase":
            kept = [
                p for p in pairs
                if max(len(tokenize(p[0])), len(tokenize(p[1]))) >= source.min_words
            ]
        elif source.role in ("compression", "simplification"):
            if scorer is None:
                raise ValueError("similarity filter requires scorer")
            kept = [p for p in pairs if scorer(p[0], p[1]) >= source.min_similarity]
        else:
            raise ValueError(f"unknown mix role {source.role!r}")
        per_source[source.name] = (len(kept), len(pairs) - len(kept))
        pooled.extend(kept)
    random.Random(spec.shuffle_seed).shuffle(pooled)
    return MixResult(pooled, per_source)
