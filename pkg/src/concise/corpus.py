"""Sentence-pair corpus I/O, evaluation reports, and evaluation-sample selection."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from .conllu import DepTree, parse_conllu
from .metrics import MetricReport, corpus_bleu, score_pair
from .textcore import tokenize
from .wordnet import WordNetDb

__all__ = [
    "CorpusError",
    "SentencePair",
    "load_corpus",
    "bundled_minicorpus_path",
    "load_predictions",
    "load_tree_map",
    "XorShiftRandom",
    "EvalSelection",
    "select_eval_samples",
    "EvalReport",
    "run_evaluate",
]

_CATEGORIES = ("I", "II", "III", "IV", "V", "VI", "VII")
_SPLITS = ("benchmark", "validation")

# fixed report column order: headline metric block, then the secondary block
TSV_COLUMNS = (
    "BL", "M", "R", "S", "P", "BS", "T", "W", "R1", "RL", "TE", "AGG",
)
_COLUMN_FIELDS = {
    "BL": "bleu",
    "M": "meteor",
    "R": "rouge2_f1",
    "S": "sari",
    "P": "relation_f1",
    "BS": "external_similarity",
    "T": "ter_rate",
    "W": "wer",
    "R1": "rouge1_f1",
    "RL": "rougeL_f1",
    "TE": "ter_edits",
    "AGG": "aggregate",
}


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class SentencePair:
    id: str
    wordy: str
    concise: tuple[str, ...]
    category: str
    source_url: str = ""
    split: str = "benchmark"


def bundled_minicorpus_path() -> Path:
    """The in-repo corpus of pairs quoted from college writing centres."""
    return Path(str(resources.files("concise.data").joinpath("minicorpus.jsonl")))


def load_corpus(path: str | Path) -> list[SentencePair]:
    """Load and schema-validate a JSON-lines corpus file."""
    rows: list[SentencePair] = []
    seen_ids: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: line {lineno}: invalid JSON ({exc})") from None

        def fail(msg: str):
            raise CorpusError(f"{path}: line {lineno}: {msg}")

        if not isinstance(raw, dict):
            fail("row is not an object")
        for key in ("id", "wordy", "concise", "category"):
            if key not in raw:
                fail(f"missing field {key!r}")
        if not isinstance(raw["concise"], list) or not raw["concise"]:
            fail("'concise' must be a non-empty list")
        if not all(isinstance(c, str) and c for c in raw["concise"]):
            fail("'concise' entries must be non-empty strings")
        split = raw.get("split", "benchmark")
        if split not in _SPLITS:
            fail(f"unknown split {split!r}")
        category = raw["category"]
        allowed = _CATEGORIES if split == "benchmark" else _CATEGORIES + ("Identity",)
        if category not in allowed:
            fail(f"unknown category {category!r} for split {split!r}")
        if raw["id"] in seen_ids:
            fail(f"duplicate id {raw['id']!r}")
        seen_ids.add(raw["id"])
        rows.append(
            SentencePair(
                id=raw["id"],
                wordy=raw["wordy"],
                concise=tuple(raw["concise"]),
                category=category,
                source_url=raw.get("source_url", ""),
                split=split,
            )
        )
    return rows


def load_predictions(path: str | Path) -> dict[str, str]:
    """JSON-lines {id, prediction} keyed by id."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            rid, pred = raw["id"], raw["prediction"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusError(f"{path}: line {lineno}: bad prediction row ({exc})") from None
        if rid in out:
            raise CorpusError(f"{path}: line {lineno}: duplicate id {rid!r}")
        out[rid] = pred
    if not out:
        raise CorpusError(f"{path}: prediction file is empty")
    return out


def load_tree_map(path: str | Path) -> dict[str, list[DepTree]]:
    """CoNLL-U file keyed by ``# id = <row id>`` comments; multiple trees per id allowed."""
    trees = parse_conllu(Path(path).read_text("utf-8"))
    out: dict[str, list[DepTree]] = {}
    for tree in trees:
        rid = None
        for comment in tree.comments:
            stripped = comment.lstrip("#").strip()
            if stripped.startswith("id ="):
                rid = stripped.split("=", 1)[1].strip()
                break
        if rid is None:
            raise CorpusError(f"{path}: tree without an '# id =' comment")
        out.setdefault(rid, []).append(tree)
    return out


class XorShiftRandom:
    """xorshift64* stream; called as rng(lo, hi) with both bounds inclusive."""

    _MASK = (1 << 64) - 1
    _MULT = 0x2545F4914F6CDD1D

    def __init__(self, seed: int = 0):
        self._state = (seed or 0x9E3779B97F4A7C15) & self._MASK

    def _next(self) -> int:
        x = self._state
        x ^= (x >> 12)
        x = (x ^ (x << 25)) & self._MASK
        x ^= (x >> 27)
        self._state = x
        return (x * self._MULT) & self._MASK

    def __call__(self, lo: int, hi: int) -> int:
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self._next() % (hi - lo + 1)


@dataclass
class EvalSelection:
    # category -> chosen row ids (bucket order: lower-ranked half, upper half)
    picks: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def all_ids(self) -> list[str]:
        return [rid for ids in self.picks.values() for rid in ids]


def select_eval_samples(
    ranked: dict[str, Sequence[str]],
    rng: Callable[[int, int], int],
) -> EvalSelection:
    """One draw from each half of every category's ranking.

    ``ranked`` maps category to row ids sorted by aggregate score descending.
    Bucket A covers ranks [0, k//2), bucket B covers [k//2, k).
    """
    selection = EvalSelection()
    for category, ids in ranked.items():
        k = len(ids)
        if k == 0:
            warnings.warn(f"category {category}: empty, skipped", RuntimeWarning,
                          stacklevel=2)
            continue
        half = k // 2
        picks: list[str] = []
        if half == 0:
            warnings.warn(
                f"category {category}: only {k} row(s), lower bucket empty",
                RuntimeWarning,
                stacklevel=2,
            )
        else:
            picks.append(ids[rng(0, half - 1)])
        picks.append(ids[rng(half, k - 1)])
        selection.picks[category] = tuple(picks)
    return selection


@dataclass
class RowResult:
    pair: SentencePair
    prediction: str
    report: MetricReport


@dataclass
class EvalReport:
    rows: list[RowResult]
    means: dict[str, dict[str, float]]  # per category plus "All"
    included_columns: tuple[str, ...]
    pooled_bleu: float | None = None

    def to_tsv(self) -> str:
        header = ["id", "category", *self.included_columns]
        lines = ["\t".join(header)]
        for row in self.rows:
            lines.append("\t".join(
                [row.pair.id, row.pair.category]
                + [_fmt(getattr(row.report, _COLUMN_FIELDS[c])) for c in self.included_columns]
            ))
        ordered = sorted(c for c in self.means if c != "All") + ["All"]
        for category in ordered:
            mean = self.means[category]
            lines.append("\t".join(
                [f"mean:{category}", category if category != "All" else "-"]
                + [_fmt(mean.get(_COLUMN_FIELDS[c])) for c in self.included_columns]
            ))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "columns": list(self.included_columns),
            "rows": [
                {
                    "id": row.pair.id,
                    "category": row.pair.category,
                    "prediction": row.prediction,
                    **{
                        c: getattr(row.report, _COLUMN_FIELDS[c])
                        for c in self.included_columns
                    },
                }
                for row in self.rows
            ],
            "means": self.means,
            "pooled_bleu": self.pooled_bleu,
        }


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def run_evaluate(
    predictions: dict[str, str],
    corpus: Sequence[SentencePair],
    *,
    db: WordNetDb | None = None,
    pred_trees: dict[str, list[DepTree]] | None = None,
    ref_trees: dict[str, list[DepTree]] | None = None,
    scorer: Callable[[str, str], float] | None = None,
    with_pooled_bleu: bool = False,
) -> EvalReport:
    """Score one prediction per corpus row and macro-average per category.

    Relation F1 and external similarity columns appear only when parses or a
    scorer are configured; the included column set is recorded on the report.
    """
    missing = [pair.id for pair in corpus if pair.id not in predictions]
    if missing:
        raise CorpusError(f"missing predictions for ids: {', '.join(missing)}")
    extra = set(predictions) - {pair.id for pair in corpus}
    if extra:
        warnings.warn(f"ignoring {len(extra)} prediction(s) with unknown ids",
                      RuntimeWarning, stacklevel=2)

    rows: list[RowResult] = []
    for pair in corpus:
        pred_text = predictions[pair.id]
        hyp = tokenize(pred_text)
        refs = [tokenize(c) for c in pair.concise]
        hyp_tree = (pred_trees or {}).get(pair.id, [None])[0]
        row_refs = (ref_trees or {}).get(pair.id)
        external = scorer(pred_text, pair.concise[0]) if scorer else None
        report = score_pair(
            tokenize(pair.wordy),
            hyp,
            refs,
            db=db,
            hyp_tree=hyp_tree,
            ref_trees=row_refs,
            external_similarity=external,
        )
        rows.append(RowResult(pair, pred_text, report))

    always = ["BL", "M", "R", "S"]
    optional = {
        "P": all(r.report.relation_f1 is not None for r in rows),
        "BS": all(r.report.external_similarity is not None for r in rows),
    }
    included = always + [c for c in ("P", "BS") if optional[c]]
    included += ["T", "W", "R1", "RL", "TE"]
    if all(r.report.aggregate is not None for r in rows):
        included.append("AGG")
    # keep canonical order
    included = [c for c in TSV_COLUMNS if c in included]

    means: dict[str, dict[str, float]] = {}
    by_category: dict[str, list[RowResult]] = {}
    for row in rows:
        by_category.setdefault(row.pair.category, []).append(row)
    for category, bucket in sorted(by_category.items()):
        means[category] = _mean_row(bucket, included)
    means["All"] = _mean_row(rows, included)

    pooled = None
    if with_pooled_bleu:
        pooled = corpus_bleu(
            [(tokenize(r.prediction), [tokenize(c) for c in r.pair.concise]) for r in rows]
        )
    return EvalReport(rows, means, tuple(included), pooled)


def _mean_row(rows: Sequence[RowResult], included: Sequence[str]) -> dict[str, float]:
    out: dict[str, float] = {"count": len(rows)}
    for column in included:
        name = _COLUMN_FIELDS[column]
        values = [getattr(r.report, name) for r in rows]
        out[name] = sum(values) / len(values)
    return out
