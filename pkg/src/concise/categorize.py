"""Assign revision pairs to the seven delete/replace/rewrite categories.

This mechanizes a human labeling procedure and is documented as an
approximation: meaning-preservation checks are replaced by syntactic
evidence. The pipeline is

1. anchor matching on unique content lemmas (irregular-verb lemma lookup,
   "-ly" stripping, then Porter stem), so morphological variants anchor;
2. crossing anchors count as rewrite evidence and leave the alignment;
3. LCS between the monotone anchors; leftover runs become deletions,
   insertions, or replacement spans, with delete-hint wordiness patterns
   carved off replacement-run edges;
4. a replacement whose material covers both a clause's subject and its
   predicate verb is further rewrite evidence (tree rule);
5. the action set maps onto categories I-VII, with changes in a clause that
   already carries rewrite evidence absorbed into the rewrite.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .conllu import DepTree
from .lexdata import form_to_lemma
from .textcore import TokenSeq, porter_stem, tokenize, translation_edit_rate
from .wordnet import load_stopwords
from .wordiness import WordinessLexicon, delete_hint_indices

__all__ = [
    "RevisionCategory",
    "Replacement",
    "RewriteEvidence",
    "AlignmentDecomposition",
    "decompose",
    "classify",
    "classify_pair",
    "corpus_stats",
    "CategoryStats",
    "is_subsequence",
]


class RevisionCategory(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    VII = "VII"
    IDENTITY = "Identity"

    @property
    def actions(self) -> frozenset[str]:
        return _ACTIONS_BY_CATEGORY[self]


_CATEGORY_BY_ACTIONS = {
    frozenset({"delete"}): RevisionCategory.I,
    frozenset({"replace"}): RevisionCategory.II,
    frozenset({"rewrite"}): RevisionCategory.III,
    frozenset({"delete", "replace"}): RevisionCategory.IV,
    frozenset({"replace", "rewrite"}): RevisionCategory.V,
    frozenset({"delete", "rewrite"}): RevisionCategory.VI,
    frozenset({"delete", "replace", "rewrite"}): RevisionCategory.VII,
}
_ACTIONS_BY_CATEGORY = {cat: acts for acts, cat in _CATEGORY_BY_ACTIONS.items()}
_ACTIONS_BY_CATEGORY[RevisionCategory.IDENTITY] = frozenset()

# clause boundaries for evidence absorption: punctuation plus frequent markers
_CLAUSE_BREAKERS = frozenset({",", ";", ":"})
_CLAUSE_MARKERS = frozenset(
    {"that", "who", "which", "because", "although", "though", "while",
     "when", "since", "if", "whereas", "unless", "after", "before"}
)


class Replacement(NamedTuple):
    w_span: tuple[int, int]  # half-open over w; may be empty (pure insertion)
    c_span: tuple[int, int]  # half-open over c


@dataclass(frozen=True)
class RewriteEvidence:
    kind: str  # crossing | subject_predicate
    w_indices: frozenset[int]
    c_indices: frozenset[int] = frozenset()


@dataclass
class AlignmentDecomposition:
    w: TokenSeq
    c: TokenSeq
    deletions: tuple[int, ...] = ()
    replacements: tuple[Replacement, ...] = ()
    rewrite_evidence: tuple[RewriteEvidence, ...] = ()
    w_prime: TokenSeq | None = None
    w_star: TokenSeq | None = None


def is_subsequence(needle: Sequence[str], haystack: Sequence[str]) -> bool:
    it = iter(haystack)
    return all(any(tok == h for h in it) for tok in needle)


def _anchor_key(norm: str) -> str:
    lemma = form_to_lemma().get(norm, norm)
    if lemma.endswith("ly") and len(lemma) > 4:
        lemma = lemma[:-2]
    return porter_stem(lemma)


def _content_positions(seq: TokenSeq, stopwords: frozenset[str]) -> dict[str, list[int]]:
    keyed: dict[str, list[int]] = {}
    for i, norm in enumerate(seq.norms):
        if norm in stopwords or not any(ch.isalnum() for ch in norm):
            continue
        keyed.setdefault(_anchor_key(norm), []).append(i)
    return keyed


def _longest_increasing(anchors: list[tuple[int, int]]) -> list[tuple[int, int]]:
    # anchors sorted by w index; LIS over the c index
    best_chain: list[tuple[int, int]] = []
    chains: list[list[tuple[int, int]]] = []
    for pair in anchors:
        candidate = max(
            (c for c in chains if c[-1][1] < pair[1]),
            key=len,
            default=[],
        )
        chain = candidate + [pair]
        chains.append(chain)
        if len(chain) > len(best_chain):
            best_chain = chain
    return best_chain


def _lcs_pairs(w: TokenSeq, c: TokenSeq, wi: list[int], ci: list[int]) -> list[tuple[int, int]]:
    n, m = len(wi), len(ci)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for a in range(n - 1, -1, -1):
        for b in range(m - 1, -1, -1):
            if w.norms[wi[a]] == c.norms[ci[b]]:
                table[a][b] = table[a + 1][b + 1] + 1
            else:
                table[a][b] = max(table[a + 1][b], table[a][b + 1])
    pairs = []
    a = b = 0
    while a < n and b < m:
        if w.norms[wi[a]] == c.norms[ci[b]]:
            pairs.append((wi[a], ci[b]))
            a += 1
            b += 1
        elif table[a + 1][b] >= table[a][b + 1]:
            a += 1
        else:
            b += 1
    return pairs


def decompose(
    w: TokenSeq,
    c: TokenSeq,
    w_tree: DepTree | None = None,
    lexicon: WordinessLexicon | None = None,
) -> AlignmentDecomposition:
    """Align a wordy/concise pair into deletions, replacements, and rewrite evidence."""
    if not len(w) or not len(c):
        raise ValueError("both sentences must be non-empty")
    stopwords = load_stopwords()

    w_keys = _content_positions(w, stopwords)
    c_keys = _content_positions(c, stopwords)
    anchors = sorted(
        (w_pos[0], c_pos[0])
        for key, w_pos in w_keys.items()
        if len(w_pos) == 1
        for c_pos in [c_keys.get(key, [])]
        if len(c_pos) == 1
    )

    monotone = _longest_increasing(anchors)
    crossing = [a for a in anchors if a not in monotone]
    evidence: list[RewriteEvidence] = []
    for idx, a in enumerate(anchors):
        for b in anchors[idx + 1 :]:
            if (a[0] - b[0]) * (a[1] - b[1]) < 0:
                evidence.append(
                    RewriteEvidence(
                        "crossing",
                        frozenset({a[0], b[0]}),
                        frozenset({a[1], b[1]}),
                    )
                )
    crossing_w = {a[0] for a in crossing}
    crossing_c = {a[1] for a in crossing}

    # aligned pairs: monotone anchors + segment-level LCS between them
    aligned: list[tuple[int, int]] = list(monotone)
    bounds = [(-1, -1)] + monotone + [(len(w), len(c))]
    for (w_lo, c_lo), (w_hi, c_hi) in zip(bounds, bounds[1:]):
        wi = [i for i in range(w_lo + 1, w_hi) if i not in crossing_w]
        ci = [j for j in range(c_lo + 1, c_hi) if j not in crossing_c]
        aligned.extend(_lcs_pairs(w, c, wi, ci))
    aligned.sort()

    # morph pairs: anchored by key but with a different surface
    morph = {
        (i, j) for i, j in monotone if w.norms[i] != c.norms[j]
    }

    hints = delete_hint_indices(w, w_tree, lexicon) if len(c) < len(w) else set()

    deletions: list[int] = []
    replacements: list[Replacement] = []

    def emit(run_w: list[int], run_c: list[int], w_anchor: int) -> None:
        if not run_w and not run_c:
            return
        if run_w and not run_c:
            deletions.extend(run_w)
            return
        if run_w:
            # carve delete-hint tokens off the edges, keeping the span non-empty
            while len(run_w) > 1 and run_w[0] in hints:
                deletions.append(run_w.pop(0))
            while len(run_w) > 1 and run_w[-1] in hints:
                deletions.append(run_w.pop())
            w_span = (run_w[0], run_w[-1] + 1)
        else:
            # pure insertion: empty w span anchored before the next aligned token
            w_span = (w_anchor, w_anchor)
        replacements.append(Replacement(w_span, (run_c[0], run_c[-1] + 1)))

    # walk gaps between exactly-aligned pairs; morph pairs fuse their gaps
    exact = [p for p in aligned if p not in morph]
    stops = [(-1, -1)] + exact + [(len(w), len(c))]
    for (w_lo, c_lo), (w_hi, c_hi) in zip(stops, stops[1:]):
        gap_morphs = sorted(m for m in morph if w_lo < m[0] < w_hi)
        gap_w = [
            i for i in range(w_lo + 1, w_hi)
            if i not in crossing_w and not any(i == m[0] for m in gap_morphs)
        ]
        gap_c = [
            j for j in range(c_lo + 1, c_hi)
            if j not in crossing_c and not any(j == m[1] for m in gap_morphs)
        ]
        if gap_morphs:
            # one replacement spanning the morph pair(s) and surrounding leftovers
            gap_w = sorted(gap_w + [m[0] for m in gap_morphs])
            gap_c = sorted(gap_c + [m[1] for m in gap_morphs])
        emit(gap_w, gap_c, w_hi)

    deletions.sort()

    # replay: deletions give w_prime, then replacements give w_star
    deleted = set(deletions)
    w_prime = TokenSeq.from_tokens(
        s for i, s in enumerate(w.surfaces) if i not in deleted
    )
    spans_by_start = {r.w_span[0]: r for r in replacements if r.w_span[0] != r.w_span[1]}
    inserts_by_anchor: dict[int, list[Replacement]] = {}
    for r in replacements:
        if r.w_span[0] == r.w_span[1]:
            inserts_by_anchor.setdefault(r.w_span[0], []).append(r)
    star: list[str] = []
    i = 0
    while i <= len(w):
        for r in inserts_by_anchor.get(i, ()):  # noqa: B905
            star.extend(c.surfaces[r.c_span[0] : r.c_span[1]])
        if i == len(w):
            break
        if i in spans_by_start:
            r = spans_by_start[i]
            star.extend(c.surfaces[r.c_span[0] : r.c_span[1]])
            i = r.w_span[1]
            continue
        if i not in deleted:
            star.append(w.surfaces[i])
        i += 1
    w_star = TokenSeq.from_tokens(star)

    # tree rule: subject and governing predicate both inside changed material
    if w_tree is not None and len(w_tree) == len(w):
        changed = set(deletions)
        for r in replacements:
            changed.update(range(r.w_span[0], r.w_span[1]))
        changed |= crossing_w
        ordered = sorted(w_tree.nodes, key=lambda n: n.id)
        pos_of = {n.id: k for k, n in enumerate(ordered)}
        for node in ordered:
            if not node.deprel.startswith("nsubj") or node.head == 0:
                continue
            subj_pos = pos_of[node.id]
            head = w_tree.node(node.head)
            pred_positions = {pos_of[head.id]}
            pred_positions.update(
                pos_of[child.id]
                for child in w_tree.children(head.id)
                if child.deprel == "cop"
            )
            if subj_pos in changed and pred_positions & changed:
                evidence.append(
                    RewriteEvidence(
                        "subject_predicate",
                        frozenset({subj_pos} | pred_positions),
                    )
                )

    return AlignmentDecomposition(
        w=w,
        c=c,
        deletions=tuple(deletions),
        replacements=tuple(replacements),
        rewrite_evidence=tuple(evidence),
        w_prime=w_prime,
        w_star=w_star,
    )


def _clause_ids(seq: TokenSeq) -> list[int]:
    ids = []
    clause = 0
    for norm in seq.norms:
        if norm in _CLAUSE_BREAKERS or norm in _CLAUSE_MARKERS:
            clause += 1
        ids.append(clause)
    return ids


def classify(d: AlignmentDecomposition) -> RevisionCategory:
    """Map a decomposition onto a category, cheapest action set first."""
    if d.w.norms == d.c.norms:
        return RevisionCategory.IDENTITY
    if is_subsequence(d.c.norms, d.w.norms):
        return RevisionCategory.I

    rewrite = bool(d.rewrite_evidence)
    if d.w_star is not None and d.w_star.norms != d.c.norms:
        rewrite = True

    evidence_w: set[int] = set()
    evidence_c: set[int] = set()
    for e in d.rewrite_evidence:
        evidence_w |= e.w_indices
        evidence_c |= e.c_indices

    actions: set[str] = set()
    if rewrite:
        actions.add("rewrite")
        clause = _clause_ids(d.w)
        evidence_clauses = {clause[i] for i in evidence_w}
        surviving = [i for i in d.deletions if clause[i] not in evidence_clauses]
    else:
        surviving = list(d.deletions)
    if surviving:
        actions.add("delete")
    for r in d.replacements:
        w_positions = set(range(r.w_span[0], r.w_span[1]))
        c_positions = set(range(r.c_span[0], r.c_span[1]))
        if w_positions & evidence_w or c_positions & evidence_c:
            continue  # folded into the rewrite
        actions.add("replace")
    if not actions:
        actions.add("rewrite")
    return _CATEGORY_BY_ACTIONS[frozenset(actions)]


def classify_pair(
    wordy: str,
    concise: str,
    w_tree: DepTree | None = None,
    lexicon: WordinessLexicon | None = None,
) -> RevisionCategory:
    return classify(decompose(tokenize(wordy), tokenize(concise), w_tree, lexicon))


class CategoryStats(NamedTuple):
    count: int
    mean_wordy_len: float
    mean_concise_len: float
    mean_ter_edits: float


def corpus_stats(corpus: Iterable) -> dict[str, CategoryStats]:
    """Per-gold-category counts, mean word counts, and mean edit counts.

    Rows need ``wordy``, ``concise`` (list, first reference used), and
    ``category`` attributes; gold labels are used, never classifier output.
    """
    buckets: dict[str, list] = {}
    for row in corpus:
        buckets.setdefault(row.category, []).append(row)
    table: dict[str, CategoryStats] = {}
    all_rows = []
    for category in sorted(buckets):
        rows = buckets[category]
        all_rows.extend(rows)
        table[category] = _stats_row(rows)
    if all_rows:
        table["All"] = _stats_row(all_rows)
    return table


def _stats_row(rows: list) -> CategoryStats:
    wordy_lens = []
    concise_lens = []
    edits = []
    for row in rows:
        w = tokenize(row.wordy)
        ref = tokenize(row.concise[0])
        wordy_lens.append(len(w))
        concise_lens.append(len(ref))
        edits.append(translation_edit_rate(w, ref).edits)
    n = len(rows)
    return CategoryStats(
        count=n,
        mean_wordy_len=sum(wordy_lens) / n,
        mean_concise_len=sum(concise_lens) / n,
        mean_ter_edits=sum(edits) / n,
    )
