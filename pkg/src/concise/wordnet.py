"""WordNet 3.0 flat-file reader, sense lookup, and Lesk disambiguation.

Reads the ``index.{noun,verb,adj,adv}`` / ``data.{noun,verb,adj,adv}`` pair
format: space-delimited fields, gloss after the ``|`` separator, header lines
indented with spaces. Adjective satellites (ss_type ``s``) are tagged ADJ-S.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .textcore import TokenSeq, tokenize

__all__ = [
    "NOUN",
    "VERB",
    "ADJ",
    "ADJ_S",
    "ADV",
    "EIGHT_PATTERNS",
    "WordNetError",
    "Synset",
    "WordNetDb",
    "load_wordnet",
    "load_stopwords",
    "lesk_disambiguate",
    "gloss_root_pattern_census",
    "CensusTable",
]

NOUN = "NOUN"
VERB = "VERB"
ADJ = "ADJ"
ADJ_S = "ADJ-S"
ADV = "ADV"

_SS_TYPE = {"n": NOUN, "v": VERB, "a": ADJ, "s": ADJ_S, "r": ADV}
_FILE_POS = {"noun": NOUN, "verb": VERB, "adj": ADJ, "adv": ADV}
# satellite queries resolve through the adjective index
_INDEX_POS = {NOUN: NOUN, VERB: VERB, ADJ: ADJ, ADJ_S: ADJ, ADV: ADV}

# word -> gloss-root POS patterns covered by the grafting rules
EIGHT_PATTERNS = frozenset(
    {
        (NOUN, NOUN),
        (VERB, VERB),
        (NOUN, VERB),
        (ADJ, VERB),
        (ADJ_S, VERB),
        (ADJ_S, ADJ),
        (ADJ, "ADP"),
        (ADV, "ADP"),
    }
)

_MARKER_RE = re.compile(r"\((a|p|ip)\)$")


class WordNetError(ValueError):
    pass


@dataclass(frozen=True)
class Synset:
    offset: int
    pos: str  # NOUN | VERB | ADJ | ADJ-S | ADV
    lemmas: tuple[str, ...]
    gloss: str

    @property
    def file_pos(self) -> str:
        return ADJ if self.pos == ADJ_S else self.pos


@dataclass
class WordNetDb:
    synsets: dict[tuple[str, int], Synset] = field(default_factory=dict)
    # (lemma, file pos) -> offsets in index-file (frequency) order
    sense_index: dict[tuple[str, str], tuple[int, ...]] = field(default_factory=dict)
    multiword_starts: dict[str, set[tuple[str, ...]]] = field(default_factory=dict)

    def lookup(self, lemma: str, pos: str) -> list[Synset]:
        key = (lemma.casefold().replace(" ", "_"), _INDEX_POS.get(pos, pos))
        offsets = self.sense_index.get(key, ())
        return [self.synsets[(key[1], off)] for off in offsets]

    def share_synset(self, lemma_a: str, lemma_b: str) -> bool:
        """True when the two lemmas co-occur in any synset (any POS)."""
        a = lemma_a.casefold().replace(" ", "_")
        b = lemma_b.casefold().replace(" ", "_")
        keys_a = {
            (pos, off)
            for (lemma, pos), offsets in self.sense_index.items()
            if lemma == a
            for off in offsets
        }
        for (lemma, pos), offsets in self.sense_index.items():
            if lemma != b:
                continue
            if keys_a.intersection((pos, off) for off in offsets):
                return True
        return False

    def all_synsets(self):
        return self.synsets.values()


def _extract_gloss(raw: str) -> str:
    # definition only: usage examples follow the first `; "`
    return re.split(r';\s*"', raw, maxsplit=1)[0].strip().rstrip(";").strip()


def _parse_data_file(path: Path, file_pos: str, db: WordNetDb) -> None:
    offset_bytes = 0
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line_start = offset_bytes
            offset_bytes += len(line.encode("utf-8"))
            if line.startswith(" ") or not line.strip():
                continue
            try:
                head, _, gloss_raw = line.partition("|")
                if not gloss_raw:
                    raise ValueError("missing gloss separator '|'")
                fields = head.split()
                synset_offset = int(fields[0])
                if len(fields[0]) != 8:
                    raise ValueError(f"offset {fields[0]!r} is not 8 digits")
                ss_type = _SS_TYPE[fields[2]]
                w_cnt = int(fields[3], 16)
                words = fields[4 : 4 + 2 * w_cnt : 2]
                if len(words) != w_cnt:
                    raise ValueError(f"expected {w_cnt} words, found {len(words)}")
                lemmas = tuple(_MARKER_RE.sub("", w).casefold() for w in words)
                gloss = _extract_gloss(gloss_raw)
                if not gloss:
                    raise ValueError("empty gloss")
            except (ValueError, KeyError, IndexError) as exc:
                raise WordNetError(
                    f"{path}: byte {line_start}: malformed data line ({exc})"
                ) from None
            db.synsets[(file_pos, synset_offset)] = Synset(
                offset=synset_offset, pos=ss_type, lemmas=lemmas, gloss=gloss
            )


def _parse_index_file(path: Path, file_pos: str, db: WordNetDb) -> None:
    offset_bytes = 0
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line_start = offset_bytes
            offset_bytes += len(line.encode("utf-8"))
            if line.startswith(" ") or not line.strip():
                continue
            try:
                fields = line.split()
                lemma = fields[0].casefold()
                p_cnt = int(fields[3])
                sense_cnt = int(fields[4 + p_cnt])
                offsets = tuple(int(o) for o in fields[6 + p_cnt : 6 + p_cnt + sense_cnt])
                if len(offsets) != sense_cnt:
                    raise ValueError(
                        f"expected {sense_cnt} offsets, found {len(offsets)}"
                    )
            except (ValueError, IndexError) as exc:
                raise WordNetError(
                    f"{path}: byte {line_start}: malformed index line ({exc})"
                ) from None
            db.sense_index[(lemma, file_pos)] = offsets
            if "_" in lemma:
                first, *rest = lemma.split("_")
                db.multiword_starts.setdefault(first, set()).add(tuple(rest))


def load_wordnet(directory: str | Path) -> WordNetDb:
    """Load all synsets from a WordNet 3.0 database directory."""
    directory = Path(directory)
    db = WordNetDb()
    for suffix, file_pos in _FILE_POS.items():
        data_path = directory / f"data.{suffix}"
        index_path = directory / f"index.{suffix}"
        for p in (data_path, index_path):
            if not p.exists():
                raise WordNetError(f"missing WordNet file: {p}")
        _parse_data_file(data_path, file_pos, db)
        _parse_index_file(index_path, file_pos, db)
    # referential integrity of the sense index
    for (lemma, pos), offsets in db.sense_index.items():
        for off in offsets:
            if (pos, off) not in db.synsets:
                raise WordNetError(
                    f"index entry {lemma!r} ({pos}) references missing synset {off:08d}"
                )
    return db


def load_stopwords() -> frozenset[str]:
    """The bundled 127-word stopword list used by Lesk and anchor matching."""
    text = resources.files("concise.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def _content_counts(norms, stopwords: frozenset[str]) -> Counter:
    return Counter(
        n for n in norms if n not in stopwords and any(ch.isalnum() for ch in n)
    )


def overlap_score(gloss: str, context: TokenSeq, lemma: str,
                  stopwords: frozenset[str]) -> int:
    """Multiset overlap between a gloss and a context, target lemma excluded."""
    gloss_counts = _content_counts(tokenize(gloss).norms, stopwords)
    target = lemma.casefold()
    context_counts = _content_counts(
        (n for n in context.norms if n != target), stopwords
    )
    return sum(min(c, context_counts[t]) for t, c in gloss_counts.items())


def lesk_disambiguate(
    lemma: str,
    pos: str,
    context: TokenSeq,
    db: WordNetDb,
    stopwords: frozenset[str] | None = None,
) -> Synset:
    """Pick the sense whose gloss shares the most content words with the context.

    Ties (including the all-zero case) go to the earliest sense in index-file
    order, i.e. the most frequent one.
    """
    senses = db.lookup(lemma, pos)
    if not senses:
        raise WordNetError(f"unknown lemma: {lemma!r} ({pos})")
    if stopwords is None:
        stopwords = load_stopwords()
    best = senses[0]
    best_score = overlap_score(best.gloss, context, lemma, stopwords)
    for sense in senses[1:]:
        score = overlap_score(sense.gloss, context, lemma, stopwords)
        if score > best_score:
            best, best_score = sense, score
    return best


@dataclass
class CensusTable:
    counts: Counter  # (word_pos, gloss_root_pos) -> count
    unparsed: int = 0

    def covered_by_patterns(self) -> float:
        total = sum(self.counts.values())
        if total == 0:
            return 0.0
        hits = sum(c for pair, c in self.counts.items() if pair in EIGHT_PATTERNS)
        return hits / total


def gloss_root_pattern_census(db: WordNetDb, parses: dict) -> CensusTable:
    """Tally (word POS, gloss-root POS) pairs over all synsets.

    ``parses`` maps (file_pos, offset) to the DepTree of that synset's gloss;
    synsets without a parse land in the ``unparsed`` bucket.
    """
    table = CensusTable(Counter())
    for (file_pos, offset), synset in db.synsets.items():
        parse = parses.get((file_pos, offset))
        if parse is None:
            table.unparsed += 1
            continue
        root_pos = parse.node(parse.root_id).upos
        table.counts[(synset.pos, root_pos)] += 1
    return table
