"""Closeness metrics for revision pairs, plus the weighted concision score.

All sentence-level metrics support multiple references and use the best
(for error rates: lowest) per-reference value, which makes every metric
monotone under added references.

BLEU note: zero-count n-gram precisions (including 0/0 when the hypothesis is
shorter than n) are floored at 1e-9 before the geometric mean, so sentences
shorter than four tokens cannot reach a BLEU of 1 even against themselves.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .conllu import DepTree, relation_triples
from .textcore import (
    TokenSeq,
    porter_stem,
    translation_edit_rate,
    word_error_rate,
)
from .wordnet import WordNetDb

__all__ = [
    "MetricReport",
    "ConcisionAssessment",
    "bleu",
    "corpus_bleu",
    "meteor",
    "rouge",
    "sari",
    "relation_f1",
    "concision_score",
    "aggregate",
    "score_pair",
]

_BLEU_EPS = 1e-9
_MAX_ORDER = 4

# alignment-search budget for the METEOR minimum-crossing tie-break;
# beyond it the first-available greedy matching is used
_METEOR_SEARCH_BUDGET = 50_000


def _ngrams(items: Sequence[str], n: int) -> Counter:
    return Counter(tuple(items[i : i + n]) for i in range(len(items) - n + 1))


def _require_refs(refs: Sequence[TokenSeq]) -> None:
    if not refs:
        raise ValueError("at least one reference is required")


# ---------------------------------------------------------------------------
# BLEU
# ---------------------------------------------------------------------------

def bleu(hyp: TokenSeq, refs: Sequence[TokenSeq]) -> float:
    """Sentence BLEU-4 with per-reference clipping and an epsilon floor."""
    _require_refs(refs)
    if len(hyp) == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, _MAX_ORDER + 1):
        hyp_ngrams = _ngrams(hyp.norms, n)
        total = sum(hyp_ngrams.values())
        ref_ngrams = [_ngrams(r.norms, n) for r in refs]
        clipped = sum(
            min(count, max(rn.get(gram, 0) for rn in ref_ngrams))
            for gram, count in hyp_ngrams.items()
        )
        precision = clipped / total if total and clipped else _BLEU_EPS
        log_sum += math.log(precision)
    # brevity penalty against the closest reference length, ties to the shorter
    c = len(hyp)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return bp * math.exp(log_sum / _MAX_ORDER)


def corpus_bleu(items: Sequence[tuple[TokenSeq, Sequence[TokenSeq]]]) -> float:
    """BLEU-4 with counts pooled across all pairs instead of macro-averaging."""
    if not items:
        raise ValueError("at least one pair is required")
    clipped = [0] * _MAX_ORDER
    totals = [0] * _MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, refs in items:
        _require_refs(refs)
        hyp_len += len(hyp)
        ref_len += min((abs(len(r) - len(hyp)), len(r)) for r in refs)[1]
        for n in range(1, _MAX_ORDER + 1):
            hyp_ngrams = _ngrams(hyp.norms, n)
            ref_ngrams = [_ngrams(r.norms, n) for r in refs]
            totals[n - 1] += sum(hyp_ngrams.values())
            clipped[n - 1] += sum(
                min(count, max(rn.get(gram, 0) for rn in ref_ngrams))
                for gram, count in hyp_ngrams.items()
            )
    log_sum = sum(
        math.log(c / t if t and c else _BLEU_EPS)
        for c, t in zip(clipped, totals)
    )
    bp = 1.0 if hyp_len >= ref_len else math.exp(1 - ref_len / max(hyp_len, 1))
    return bp * math.exp(log_sum / _MAX_ORDER)


# ---------------------------------------------------------------------------
# METEOR (Banerjee & Lavie 2005 parameters)
# ---------------------------------------------------------------------------

def _max_matching_size(edges: dict[int, list[int]]) -> int:
    matched: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for j in edges.get(i, ()):  # noqa: B905
            if j in seen:
                continue
            seen.add(j)
            if j not in matched or augment(matched[j], seen):
                matched[j] = i
                return True
        return False

    return sum(augment(i, set()) for i in edges)


def _crossings(pairs: list[tuple[int, int]]) -> int:
    return sum(
        1
        for a in range(len(pairs))
        for b in range(a + 1, len(pairs))
        if (pairs[a][0] - pairs[b][0]) * (pairs[a][1] - pairs[b][1]) < 0
    )


def _min_crossing_matching(edges: dict[int, list[int]]) -> list[tuple[int, int]]:
    """Maximum-cardinality matching with the fewest crossings.

    Exhaustive branch-and-bound; falls back to first-available greedy if the
    search budget runs out (only reachable on adversarial duplicate patterns).
    """
    target = _max_matching_size(edges)
    hyp_positions = sorted(edges)
    best: list[tuple[int, int]] | None = None
    best_cross = math.inf
    budget = [_METEOR_SEARCH_BUDGET]

    def walk(idx: int, chosen: list[tuple[int, int]], used: set[int]) -> None:
        nonlocal best, best_cross
        if budget[0] <= 0:
            return
        budget[0] -= 1
        remaining = len(hyp_positions) - idx
        if len(chosen) + remaining < target:
            return
        if idx == len(hyp_positions):
            if len(chosen) == target:
                cross = _crossings(chosen)
                if cross < best_cross:
                    best, best_cross = list(chosen), cross
            return
        i = hyp_positions[idx]
        for j in edges[i]:
            if j in used:
                continue
            chosen.append((i, j))
            used.add(j)
            walk(idx + 1, chosen, used)
            chosen.pop()
            used.remove(j)
        walk(idx + 1, chosen, used)  # leave i unmatched

    walk(0, [], set())
    if best is not None:
        return best
    # greedy fallback: first unused reference position per hypothesis token
    out: list[tuple[int, int]] = []
    used: set[int] = set()
    for i in hyp_positions:
        for j in edges[i]:
            if j not in used:
                out.append((i, j))
                used.add(j)
                break
    return out


def _meteor_single(hyp: TokenSeq, ref: TokenSeq, db: WordNetDb | None) -> float:
    if len(hyp) == 0 or len(ref) == 0:
        return 0.0
    hyp_free = set(range(len(hyp)))
    ref_free = set(range(len(ref)))
    pairs: list[tuple[int, int]] = []

    def run_stage(match) -> None:
        edges = {
            i: [j for j in sorted(ref_free) if match(hyp.norms[i], ref.norms[j])]
            for i in sorted(hyp_free)
        }
        edges = {i: js for i, js in edges.items() if js}
        if not edges:
            return
        for i, j in _min_crossing_matching(edges):
            pairs.append((i, j))
            hyp_free.discard(i)
            ref_free.discard(j)

    run_stage(lambda a, b: a == b)
    run_stage(lambda a, b: porter_stem(a) == porter_stem(b))
    if db is not None:
        run_stage(lambda a, b: db.share_synset(a, b))

    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(hyp)
    recall = matches / len(ref)
    fmean = 10 * precision * recall / (recall + 9 * precision)
    ordered = sorted(pairs)
    chunks = 1 + sum(
        1
        for k in range(1, len(ordered))
        if ordered[k] != (ordered[k - 1][0] + 1, ordered[k - 1][1] + 1)
    )
    penalty = 0.5 * (chunks / matches) ** 3
    return fmean * (1 - penalty)


def meteor(hyp: TokenSeq, refs: Sequence[TokenSeq], db: WordNetDb | None = None) -> float:
    """Staged unigram matching: exact surface, Porter stem, then synset co-membership."""
    _require_refs(refs)
    return max(_meteor_single(hyp, ref, db) for ref in refs)


# ---------------------------------------------------------------------------
# ROUGE
# ---------------------------------------------------------------------------

def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def rouge(hyp: TokenSeq, refs: Sequence[TokenSeq], variant: Literal[1, 2, "L"]) -> float:
    """N-gram overlap F1 (variants 1, 2) or LCS-based F1 (variant "L")."""
    _require_refs(refs)
    best = 0.0
    for ref in refs:
        if variant == "L":
            if len(hyp) == 0 or len(ref) == 0:
                continue
            lcs = _lcs_length(hyp.norms, ref.norms)
            score = _f1(lcs / len(hyp), lcs / len(ref))
        else:
            h = _ngrams(hyp.norms, variant)
            r = _ngrams(ref.norms, variant)
            if not h or not r:
                continue
            overlap = sum((h & r).values())
            score = _f1(overlap / sum(h.values()), overlap / sum(r.values()))
        best = max(best, score)
    return best


# ---------------------------------------------------------------------------
# SARI (set form, per-reference best)
# ---------------------------------------------------------------------------

def _set_f1(cand: set, gold: set) -> float:
    if not cand and not gold:
        return 1.0  # vacuous success: nothing to do, nothing done
    if not cand or not gold:
        return 0.0
    inter = len(cand & gold)
    return _f1(inter / len(cand), inter / len(gold))


def _set_precision(cand: set, gold: set) -> float:
    if not cand and not gold:
        return 1.0
    if not cand or not gold:
        return 0.0
    return len(cand & gold) / len(cand)


def _sari_single(src: TokenSeq, hyp: TokenSeq, ref: TokenSeq) -> float:
    per_n = []
    for n in range(1, _MAX_ORDER + 1):
        s = set(_ngrams(src.norms, n))
        h = set(_ngrams(hyp.norms, n))
        r = set(_ngrams(ref.norms, n))
        keep = _set_f1(s & h, s & r)
        add = _set_f1(h - s, r - s)
        delete = _set_precision(s - h, s - r)
        per_n.append((keep + add + delete) / 3)
    return sum(per_n) / len(per_n)


def sari(src: TokenSeq, hyp: TokenSeq, refs: Sequence[TokenSeq]) -> float:
    """Keep/add/delete n-gram editing quality against source and references."""
    _require_refs(refs)
    return max(_sari_single(src, hyp, ref) for ref in refs)


# ---------------------------------------------------------------------------
# Parsed relation F1
# ---------------------------------------------------------------------------

def relation_f1(hyp_tree: DepTree, ref_trees: Sequence[DepTree]) -> float:
    _require_refs(ref_trees)
    hyp_triples = relation_triples(hyp_tree)
    best = 0.0
    for ref_tree in ref_trees:
        ref_triples = relation_triples(ref_tree)
        inter = sum((hyp_triples & ref_triples).values())
        denom = sum(hyp_triples.values()) + sum(ref_triples.values())
        best = max(best, 2 * inter / denom if denom else 0.0)
    return best


# ---------------------------------------------------------------------------
# Concision score and the aggregate
# ---------------------------------------------------------------------------

@dataclass
class ConcisionAssessment:
    """Grammaticality, information retention, wordiness and their weighting."""

    gamma: float
    rho: float
    omega: float
    alpha: float = 20.0
    chi: float | None = None


def concision_score(a: ConcisionAssessment) -> float:
    if a.alpha <= 1:
        raise ValueError("alpha must exceed 1")
    for name, value in (("gamma", a.gamma), ("rho", a.rho), ("omega", a.omega)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    a.chi = a.alpha**2 * (a.gamma - 1) + a.alpha * (a.rho - 1) + (1 - a.omega)
    return a.chi


@dataclass
class MetricReport:
    bleu: float | None = None
    meteor: float | None = None
    rouge1_f1: float | None = None
    rouge2_f1: float | None = None
    rougeL_f1: float | None = None
    sari: float | None = None
    wer: float | None = None
    ter_rate: float | None = None
    ter_edits: int | None = None
    relation_f1: float | None = None
    external_similarity: float | None = None
    aggregate: float | None = None
    included: tuple[str, ...] = field(default=())


_AGGREGATE_REQUIRED = ("bleu", "meteor", "rouge2_f1", "sari", "relation_f1", "ter_rate")


def aggregate(report: MetricReport) -> float:
    """Mean of the headline metrics with negated translation edit rate.

    external_similarity joins the mean only when present; the divisor is the
    number of included terms, which are recorded on the report.
    """
    missing = [name for name in _AGGREGATE_REQUIRED if getattr(report, name) is None]
    if missing:
        raise ValueError(f"aggregate requires metrics: {', '.join(missing)}")
    included = ["bleu", "meteor", "rouge2_f1", "sari", "relation_f1"]
    terms = [getattr(report, name) for name in included]
    if report.external_similarity is not None:
        included.append("external_similarity")
        terms.append(report.external_similarity)
    included.append("-ter_rate")
    terms.append(-report.ter_rate)
    report.included = tuple(included)
    report.aggregate = sum(terms) / len(terms)
    return report.aggregate


def score_pair(
    src: TokenSeq,
    hyp: TokenSeq,
    refs: Sequence[TokenSeq],
    *,
    db: WordNetDb | None = None,
    hyp_tree: DepTree | None = None,
    ref_trees: Sequence[DepTree] | None = None,
    external_similarity: float | None = None,
) -> MetricReport:
    """Compute the full per-pair report; tree and similarity columns are optional."""
    _require_refs(refs)
    nonempty = [r for r in refs if len(r)]
    ter_scores = [translation_edit_rate(hyp, r) for r in nonempty]
    report = MetricReport(
        bleu=bleu(hyp, refs),
        meteor=meteor(hyp, refs, db),
        rouge1_f1=rouge(hyp, refs, 1),
        rouge2_f1=rouge(hyp, refs, 2),
        rougeL_f1=rouge(hyp, refs, "L"),
        sari=sari(src, hyp, refs),
        wer=min(word_error_rate(hyp, r) for r in nonempty),
        ter_rate=min(t.rate for t in ter_scores),
        ter_edits=min(t.edits for t in ter_scores),
        external_similarity=external_similarity,
    )
    if hyp_tree is not None and ref_trees:
        report.relation_f1 = relation_f1(hyp_tree, ref_trees)
        aggregate(report)
    return report
