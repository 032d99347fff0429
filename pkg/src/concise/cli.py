"""The ``concise`` command line: validate, stats, categorize, evaluate,
synthesize, mix, wordiness, select-eval.

Exit codes: 0 ok, 1 input error, 2 internal error.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import categorize as cat
from . import corpus as corpusmod
from . import synthesize as synth
from . import wordiness as wordymod
from .bridgeclient import BridgeClient
from .conllu import ConlluError, linearize, parse_conllu
from .corpus import CorpusError, XorShiftRandom, bundled_minicorpus_path
from .metrics import ConcisionAssessment, concision_score
from .textcore import tokenize
from .wordnet import WordNetError, load_wordnet


class _Fail(click.ClickException):
    exit_code = 1


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _load_corpus(path: str | None):
    return corpusmod.load_corpus(path or bundled_minicorpus_path())


corpus_option = click.option("--corpus", "corpus_path", type=click.Path(),
                             default=None, help="Corpus JSONL (default: bundled mini-corpus).")
out_option = click.option("--out", type=click.Path(), default=None,
                          help="Output path (default: stdout).")
format_option = click.option("--format", "fmt", type=click.Choice(["json", "tsv"]),
                             default="tsv", show_default=True)


@click.group()
def cli():
    """Revision toolkit: score, categorize, and synthesize sentence revisions."""


@cli.command()
@corpus_option
def validate(corpus_path):
    """Schema-check a corpus file."""
    rows = _load_corpus(corpus_path)
    click.echo(f"ok: {len(rows)} rows")


@cli.command()
@corpus_option
@format_option
@out_option
def stats(corpus_path, fmt, out):
    """Per-category counts, mean word counts, and mean edit counts."""
    rows = _load_corpus(corpus_path)
    table = cat.corpus_stats(rows)
    if fmt == "json":
        payload = {
            name: {
                "count": s.count,
                "mean_wordy_len": s.mean_wordy_len,
                "mean_concise_len": s.mean_concise_len,
                "mean_ter_edits": s.mean_ter_edits,
            }
            for name, s in table.items()
        }
        _write_out(json.dumps(payload, indent=1) + "\n", out)
        return
    lines = ["category\tcount\tmean_wordy\tmean_concise\tmean_ter_edits"]
    for name, s in table.items():
        lines.append(
            f"{name}\t{s.count}\t{s.mean_wordy_len:.2f}"
            f"\t{s.mean_concise_len:.2f}\t{s.mean_ter_edits:.2f}"
        )
    _write_out("\n".join(lines) + "\n", out)


@cli.command("categorize")
@corpus_option
@click.option("--conllu-wordy", type=click.Path(exists=True), default=None,
              help="Parses of the wordy sentences, keyed by '# id =' comments.")
@format_option
@out_option
def categorize_cmd(corpus_path, conllu_wordy, fmt, out):
    """Classify each pair against its first reference and compare to gold."""
    rows = _load_corpus(corpus_path)
    trees = corpusmod.load_tree_map(conllu_wordy) if conllu_wordy else {}
    results = []
    hits = 0
    for pair in rows:
        tree = trees.get(pair.id, [None])[0]
        predicted = cat.classify_pair(pair.wordy, pair.concise[0], w_tree=tree)
        hit = predicted.value == pair.category
        hits += hit
        results.append((pair.id, pair.category, predicted.value, hit))
    if fmt == "json":
        payload = {
            "accuracy": hits / len(results) if results else 0.0,
            "rows": [
                {"id": rid, "gold": gold, "predicted": pred, "match": hit}
                for rid, gold, pred, hit in results
            ],
        }
        _write_out(json.dumps(payload, indent=1) + "\n", out)
        return
    lines = ["id\tgold\tpredicted\tmatch"]
    lines += [f"{rid}\t{gold}\t{pred}\t{int(hit)}" for rid, gold, pred, hit in results]
    if results:
        lines.append(f"accuracy\t{hits}/{len(results)}\t{hits / len(results):.4f}\t-")
    _write_out("\n".join(lines) + "\n", out)


@cli.command()
@corpus_option
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True,
              help="Predictions JSONL: one {id, prediction} per line.")
@click.option("--conllu-pred", type=click.Path(exists=True), default=None)
@click.option("--conllu-ref", type=click.Path(exists=True), default=None)
@click.option("--wordnet", "wordnet_dir", type=click.Path(exists=True), default=None,
              help="WordNet directory for METEOR synonym matching.")
@click.option("--parser", "parser_cmd", default=None,
              help="Bridge command for parsing predictions and references.")
@click.option("--scorer", "scorer_cmd", default=None,
              help="Bridge command for external similarity scores.")
@click.option("--corpus-bleu", "pooled", is_flag=True,
              help="Also report corpus-level pooled BLEU.")
@format_option
@out_option
def evaluate(corpus_path, pred_path, conllu_pred, conllu_ref, wordnet_dir,
             parser_cmd, scorer_cmd, pooled, fmt, out):
    """Score predictions against the corpus references."""
    rows = _load_corpus(corpus_path)
    predictions = corpusmod.load_predictions(pred_path)
    db = load_wordnet(wordnet_dir) if wordnet_dir else None
    pred_trees = corpusmod.load_tree_map(conllu_pred) if conllu_pred else None
    ref_trees = corpusmod.load_tree_map(conllu_ref) if conllu_ref else None

    parser = BridgeClient(parser_cmd) if parser_cmd else None
    scorer_bridge = BridgeClient(scorer_cmd) if scorer_cmd else None
    try:
        if parser and (pred_trees is None or ref_trees is None):
            pred_trees = pred_trees or {}
            ref_trees = ref_trees or {}
            for pair in rows:
                if pair.id not in predictions:
                    continue
                pred_trees.setdefault(pair.id, [parser.parse(predictions[pair.id])])
                ref_trees.setdefault(pair.id, [parser.parse(c) for c in pair.concise])
        scorer = scorer_bridge.similarity if scorer_bridge else None
        report = corpusmod.run_evaluate(
            predictions, rows, db=db,
            pred_trees=pred_trees, ref_trees=ref_trees,
            scorer=scorer, with_pooled_bleu=pooled,
        )
    finally:
        if parser:
            parser.close()
        if scorer_bridge:
            scorer_bridge.close()

    click.echo(f"included metrics: {', '.join(report.included_columns)}", err=True)
    if fmt == "json":
        _write_out(json.dumps(report.to_json_dict(), indent=1) + "\n", out)
    else:
        _write_out(report.to_tsv(), out)


@cli.command()
@click.option("--conllu", "conllu_path", type=click.Path(exists=True), required=True,
              help="Source sentences as CoNLL-U.")
@click.option("--wordnet", "wordnet_dir", type=click.Path(exists=True), required=True)
@click.option("--gloss-parses", type=click.Path(exists=True), default=None,
              help="CoNLL-U of gloss parses keyed by '# synset = pos:offset' comments.")
@click.option("--parser", "parser_cmd", default=None,
              help="Bridge command; parses glosses on demand and reparses output.")
@click.option("--scorer", "scorer_cmd", default=None,
              help="Bridge command scoring original/inflated similarity.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--rounds", type=int, default=1, show_default=True,
              help="Recursive expansion passes per sentence.")
@click.option("--freq-k", type=int, default=synth.DEFAULT_FREQ_RANK, show_default=True,
              help="Frequency rank at or under which words count as common.")
@click.option("--unlabeled", is_flag=True,
              help="Use unlabeled attachment for the reparse filter.")
@out_option
def synthesize(conllu_path, wordnet_dir, gloss_parses, parser_cmd, scorer_cmd,
               seed, rounds, freq_k, unlabeled, out):
    """Inflate parsed sentences by gloss grafting; one JSON record per line."""
    db = load_wordnet(wordnet_dir)
    trees = parse_conllu(Path(conllu_path).read_text("utf-8"))

    gloss_map = {}
    if gloss_parses:
        for tree in parse_conllu(Path(gloss_parses).read_text("utf-8")):
            for comment in tree.comments:
                stripped = comment.lstrip("#").strip()
                if stripped.startswith("synset ="):
                    pos, _, offset = stripped.split("=", 1)[1].strip().partition(":")
                    gloss_map[(pos.strip(), int(offset))] = tree

    parser = BridgeClient(parser_cmd) if parser_cmd else None
    scorer = BridgeClient(scorer_cmd) if scorer_cmd else None

    def gloss_parse(sense):
        key = (sense.file_pos, sense.offset)
        if key in gloss_map:
            return gloss_map[key]
        if parser:
            tree = parser.parse(synth.strip_parenthetical(sense.gloss))
            if tree is not None:
                gloss_map[key] = tree
            return tree
        return None

    records = []
    try:
        for index, tree in enumerate(trees):
            original = linearize(tree).text()
            built, reason, flags = synth.synthesize_sentence(
                tree, db, gloss_parse, seed=seed + index, rounds=rounds,
                freq_rank=freq_k,
            )
            if built is None:
                records.append(synth.SynthesisRecord(
                    original, original, "dropped", reason=reason))
                continue
            inflated = linearize(built).text()
            record = synth.SynthesisRecord(original, inflated, "kept", flags=tuple(sorted(flags)))
            if parser:
                reparsed = parser.parse(inflated)
                similarity = scorer.similarity(original, inflated) if scorer else None
                record = synth.filter_synthesis(
                    record, built, reparsed, similarity, labeled=not unlabeled,
                )
            else:
                record = synth.SynthesisRecord(
                    original, inflated, "kept",
                    flags=record.flags + ("reparse_unfiltered",),
                )
            records.append(record)
    finally:
        if parser:
            parser.close()
        if scorer:
            scorer.close()

    payload = "\n".join(json.dumps(r.to_json_dict()) for r in records) + "\n"
    _write_out(payload, out)
    kept = sum(r.verdict == "kept" for r in records)
    click.echo(f"kept {kept}/{len(records)}", err=True)


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True,
              help="JSON: {sources: [{name, path, role, min_words?, min_similarity?}], shuffle_seed}.")
@click.option("--scorer", "scorer_cmd", default=None)
@click.option("--seed", type=int, default=None, help="Overrides the spec's shuffle_seed.")
@out_option
def mix(spec_path, scorer_cmd, seed, out):
    """Build a filtered multi-source parallel corpus (TSV to --out/stdout)."""
    raw = json.loads(Path(spec_path).read_text("utf-8"))
    sources = tuple(
        synth.MixSource(
            name=s["name"],
            path=s["path"],
            role=s["role"],
            min_words=s.get("min_words", 10),
            min_similarity=s.get("min_similarity", 0.9),
        )
        for s in raw.get("sources", ())
    )
    shuffle_seed = seed if seed is not None else raw.get("shuffle_seed", 0)
    spec = synth.MixSpec(sources, shuffle_seed)
    bridge = BridgeClient(scorer_cmd) if scorer_cmd else None
    try:
        result = synth.mix_datasets(spec, bridge.similarity if bridge else None)
    finally:
        if bridge:
            bridge.close()
    for name, (kept, dropped) in result.per_source.items():
        click.echo(f"{name}: kept {kept}, dropped {dropped}", err=True)
    click.echo(f"total: {len(result.pairs)}", err=True)
    _write_out("".join(f"{a}\t{b}\n" for a, b in result.pairs), out)


@cli.command("wordiness")
@click.argument("text", required=False)
@corpus_option
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.option("--alpha", type=float, default=20.0, show_default=True)
@click.option("--gamma", type=float, default=None, help="Grammaticality for the weighted score.")
@click.option("--rho", type=float, default=None, help="Information retention for the weighted score.")
@format_option
@out_option
def wordiness_cmd(text, corpus_path, lexicon_path, alpha, gamma, rho, fmt, out):
    """Detect wordiness spans (and optionally the weighted concision score)."""
    lexicon = wordymod.load_lexicon(lexicon_path) if lexicon_path else None
    if text is not None:
        sentences = [("arg", text)]
    else:
        sentences = [(p.id, p.wordy) for p in _load_corpus(corpus_path)]
    results = []
    for sid, sentence in sentences:
        toks = tokenize(sentence)
        spans = wordymod.detect(toks, lexicon=lexicon)
        fraction = wordymod.omega(toks, spans)
        offsets = _char_spans(sentence, toks.surfaces)
        entry = {
            "id": sid,
            "text": sentence,
            "omega": fraction,
            "spans": [
                {
                    "start": s.start,
                    "end": s.end,
                    "char_start": offsets[s.start][0],
                    "char_end": offsets[s.end - 1][1],
                    "class": s.kind,
                    "pattern": s.pattern_id,
                    "tokens": " ".join(toks.surfaces[s.start:s.end]),
                }
                for s in spans
            ],
        }
        if gamma is not None and rho is not None:
            entry["chi"] = concision_score(
                ConcisionAssessment(gamma, rho, fraction, alpha)
            )
        results.append(entry)
    if fmt == "json":
        _write_out(json.dumps(results, indent=1) + "\n", out)
        return
    lines = []
    for entry in results:
        lines.append(f"{entry['id']}\tomega={entry['omega']:.4f}"
                     + (f"\tchi={entry['chi']:.4f}" if "chi" in entry else ""))
        for span in entry["spans"]:
            lines.append(
                f"  chars [{span['char_start']},{span['char_end']})"
                f"\t{span['class']}\t{span['tokens']}"
            )
    _write_out("\n".join(lines) + "\n", out)


def _char_spans(text: str, surfaces) -> list[tuple[int, int]]:
    # tokens are verbatim, ordered substrings of the original text
    spans = []
    cursor = 0
    for surface in surfaces:
        start = text.find(surface, cursor)
        if start == -1:
            start = cursor
        cursor = start + len(surface)
        spans.append((start, cursor))
    return spans


@cli.command("select-eval")
@click.option("--report", "report_path", type=click.Path(exists=True), required=True,
              help="JSON report from `concise evaluate --format json` (needs AGG).")
@click.option("--seed", type=int, default=0, show_default=True)
@format_option
@out_option
def select_eval(report_path, seed, fmt, out):
    """Pick one row from each ranked half of every category."""
    payload = json.loads(Path(report_path).read_text("utf-8"))
    rows = payload.get("rows", [])
    if not rows:
        raise _Fail("report has no rows")
    if any("AGG" not in row for row in rows):
        raise _Fail("report rows lack the aggregate column; "
                    "run evaluate with parses configured")
    ranked: dict[str, list[str]] = {}
    for row in sorted(rows, key=lambda r: -r["AGG"]):
        ranked.setdefault(row["category"], []).append(row["id"])
    selection = corpusmod.select_eval_samples(ranked, XorShiftRandom(seed))
    if fmt == "json":
        _write_out(json.dumps({k: list(v) for k, v in selection.picks.items()},
                              indent=1) + "\n", out)
        return
    lines = [f"{category}\t" + "\t".join(ids) for category, ids in selection.picks.items()]
    _write_out("\n".join(lines) + "\n", out)


def main() -> int:
    try:
        cli(standalone_mode=False)
        return 0
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except (CorpusError, ConlluError, WordNetError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception as exc:  # pragma: no cover - internal failure path
        click.echo(f"internal error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
