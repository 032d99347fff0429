from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from concise.cli import cli
from concise.corpus import (
    CorpusError,
    EvalSelection,
    XorShiftRandom,
    bundled_minicorpus_path,
    load_corpus,
    load_predictions,
    run_evaluate,
    select_eval_samples,
)

TABLE_SIZES = {"I": 169, "II": 116, "III": 153, "IV": 42, "V": 33, "VI": 14, "VII": 9}


@pytest.fixture(scope="module")
def mini_rows():
    return load_corpus(bundled_minicorpus_path())


class TestLoadCorpus:
    def test_bundled_minicorpus_has_fifteen_rows(self, mini_rows):
        assert len(mini_rows) == 15

    def test_every_row_is_benchmark_with_category(self, mini_rows):
        assert all(r.split == "benchmark" for r in mini_rows)
        assert all(r.category in "I II III IV V VI VII".split() for r in mini_rows)

    def test_missing_concise_rejected(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id": "x", "wordy": "a b", "category": "I"}\n')
        with pytest.raises(CorpusError, match="line 1.*concise"):
            load_corpus(bad)

    def test_duplicate_ids_rejected(self, tmp_path):
        row = '{"id": "x", "wordy": "a", "concise": ["b"], "category": "I"}\n'
        bad = tmp_path / "dup.jsonl"
        bad.write_text(row + row)
        with pytest.raises(CorpusError, match="duplicate id"):
            load_corpus(bad)

    def test_bad_category_rejected(self, tmp_path):
        bad = tmp_path / "cat.jsonl"
        bad.write_text('{"id": "x", "wordy": "a", "concise": ["b"], "category": "VIII"}\n')
        with pytest.raises(CorpusError, match="unknown category"):
            load_corpus(bad)

    def test_unknown_keys_tolerated(self, tmp_path):
        ok = tmp_path / "extra.jsonl"
        ok.write_text(
            '{"id": "x", "wordy": "a", "concise": ["b"], "category": "I", "subject_arcs": [[0, 1]]}\n'
        )
        assert len(load_corpus(ok)) == 1


class TestPredictions:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "pred.jsonl"
        p.write_text('{"id": "a", "prediction": "x"}\n{"id": "b", "prediction": "y"}\n')
        assert load_predictions(p) == {"a": "x", "b": "y"}

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "pred.jsonl"
        p.write_text("")
        with pytest.raises(CorpusError, match="empty"):
            load_predictions(p)


class TestXorShift:
    def test_deterministic(self):
        a = XorShiftRandom(7)
        b = XorShiftRandom(7)
        assert [a(0, 100) for _ in range(10)] == [b(0, 100) for _ in range(10)]

    def test_bounds_inclusive(self):
        rng = XorShiftRandom(1)
        draws = {rng(2, 4) for _ in range(200)}
        assert draws == {2, 3, 4}

    def test_seed_zero_usable(self):
        assert 0 <= XorShiftRandom(0)(0, 9) <= 9


class TestSelectEvalSamples:
    def test_stub_rng_picks_lower_bounds(self):
        ranked = {c: [f"{c}-{i}" for i in range(k)] for c, k in TABLE_SIZES.items()}
        stub = lambda lo, hi: lo
        selection = select_eval_samples(ranked, stub)
        for category, k in TABLE_SIZES.items():
            assert selection.picks[category] == (f"{category}-0", f"{category}-{k // 2}")

    def test_table_sizes_give_fourteen_ids(self):
        ranked = {c: [f"{c}-{i}" for i in range(k)] for c, k in TABLE_SIZES.items()}
        selection = select_eval_samples(ranked, XorShiftRandom(0))
        assert len(selection.all_ids()) == 14
        # buckets respected: first pick from [0, k//2), second from [k//2, k)
        for category, k in TABLE_SIZES.items():
            first, second = selection.picks[category]
            assert int(first.split("-")[1]) < k // 2
            assert int(second.split("-")[1]) >= k // 2

    def test_single_row_category_warns_and_picks_once(self):
        with pytest.warns(RuntimeWarning, match="lower bucket empty"):
            selection = select_eval_samples({"VII": ["only"]}, XorShiftRandom(3))
        assert selection.picks["VII"] == ("only",)

    def test_empty_category_skipped_with_warning(self):
        with pytest.warns(RuntimeWarning, match="empty, skipped"):
            selection = select_eval_samples({"VI": []}, XorShiftRandom(3))
        assert "VI" not in selection.picks

    def test_deterministic_given_seed(self):
        ranked = {"I": [str(i) for i in range(20)]}
        a = select_eval_samples(ranked, XorShiftRandom(5))
        b = select_eval_samples(ranked, XorShiftRandom(5))
        assert a.picks == b.picks


class TestRunEvaluate:
    def test_identity_predictions(self, mini_rows):
        preds = {r.id: r.concise[0] for r in mini_rows}
        report = run_evaluate(preds, mini_rows)
        assert report.means["All"]["bleu"] == pytest.approx(1.0)
        assert report.means["All"]["ter_edits"] == 0
        assert report.means["All"]["ter_rate"] == 0.0
        assert "P" not in report.included_columns
        assert "AGG" not in report.included_columns

    def test_wordy_predictions_match_stats_edits(self, mini_rows):
        from concise.categorize import corpus_stats

        preds = {r.id: r.wordy for r in mini_rows}
        report = run_evaluate(preds, mini_rows)
        stats = corpus_stats(mini_rows)
        # single-reference rows: evaluate's best-reference TER equals the
        # stats table's first-reference TER except where extra refs help
        assert report.means["All"]["ter_edits"] <= stats["All"].mean_ter_edits

    def test_missing_ids_listed(self, mini_rows):
        preds = {r.id: r.concise[0] for r in mini_rows[:-2]}
        with pytest.raises(CorpusError, match="missing predictions.*"):
            run_evaluate(preds, mini_rows)

    def test_tsv_column_order_pinned(self, mini_rows):
        preds = {r.id: r.concise[0] for r in mini_rows}
        report = run_evaluate(preds, mini_rows)
        header = report.to_tsv().splitlines()[0]
        assert header == "id\tcategory\tBL\tM\tR\tS\tT\tW\tR1\tRL\tTE"

    def test_tsv_row_format_golden(self, tmp_path):
        # identity prediction over one row: every cell value is forced
        from concise.corpus import SentencePair

        pair = SentencePair("r1", "the old report was very long", ("the report was long",), "I")
        preds = {"r1": "the report was long"}
        report = run_evaluate(preds, [pair])
        lines = report.to_tsv().splitlines()
        meteor_identity = 1 - 0.5 / 4**3
        assert lines[1] == (
            f"r1\tI\t1.0000\t{meteor_identity:.4f}\t1.0000\t1.0000"
            "\t0.0000\t0.0000\t1.0000\t1.0000\t0"
        )
        assert lines[2].startswith("mean:I\tI\t1.0000")
        assert lines[3].startswith("mean:All\t-\t1.0000")


class TestCli:
    def run(self, *args):
        return CliRunner().invoke(cli, args, catch_exceptions=False)

    def test_validate_bundled(self):
        result = self.run("validate")
        assert result.exit_code == 0
        assert "ok: 15 rows" in result.stdout

    def test_stats_tsv(self):
        result = self.run("stats")
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0].startswith("category\tcount")
        assert any(line.startswith("All\t15") for line in lines)

    def test_categorize_reports_accuracy(self):
        result = self.run("categorize", "--format", "json")
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        # the rewrite-heavy rows need parse trees for exact labels; the strict
        # per-category checks live in the acceptance suite
        assert payload["accuracy"] >= 11 / 15

    def test_evaluate_end_to_end(self, tmp_path, mini_rows):
        pred = tmp_path / "pred.jsonl"
        pred.write_text(
            "\n".join(
                json.dumps({"id": r.id, "prediction": r.concise[0]}) for r in mini_rows
            )
            + "\n"
        )
        result = self.run("evaluate", "--pred", str(pred))
        assert result.exit_code == 0
        assert result.stdout.splitlines()[0].startswith("id\tcategory\tBL")
        assert "mean:All" in result.stdout

    def test_wordiness_text_argument(self):
        result = self.run(
            "wordiness", "there are four rules that should be observed",
            "--format", "json",
        )
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload[0]["omega"] > 0
        assert any(s["class"] == "running_start" for s in payload[0]["spans"])

    def test_wordiness_chi(self):
        result = self.run(
            "wordiness", "this report studies ants",
            "--gamma", "1.0", "--rho", "1.0", "--format", "json",
        )
        payload = json.loads(result.stdout)
        assert payload[0]["chi"] == pytest.approx(1.0)  # no wordiness -> 1 - 0

    def test_mix_cli(self, tmp_path):
        src = tmp_path / "pairs.tsv"
        src.write_text("a b c d e f g h i j k\tshort\nx\ty\n")
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "sources": [{"name": "p", "path": str(src), "role": "paraphrase"}],
            "shuffle_seed": 1,
        }))
        result = self.run("mix", "--spec", str(spec))
        assert result.exit_code == 0
        assert result.stdout == "a b c d e f g h i j k\tshort\n"

    def test_synthesize_cli_golden(self, tmp_path, fixtures_dir):
        import concise
        from pathlib import Path

        wn = Path(concise.__file__).parent / "data" / "wordnet_mini"
        out = tmp_path / "records.jsonl"
        result = self.run(
            "synthesize",
            "--conllu", str(fixtures_dir / "source_passive.conllu"),
            "--wordnet", str(wn),
            "--gloss-parses", str(fixtures_dir / "gloss_parses.conllu"),
            "--seed", "0",
            "--out", str(out),
        )
        assert result.exit_code == 0
        record = json.loads(out.read_text().splitlines()[0])
        assert record["original"] == "Several reviews have been published"
        assert record["inflated"] == "Several reviews have been had issued for publication"
        assert record["verdict"] == "kept"
        assert "reparse_unfiltered" in record.get("flags", [])

    def test_select_eval_cli(self, tmp_path):
        rows = []
        for category, k in (("I", 4), ("II", 3)):
            for i in range(k):
                rows.append({"id": f"{category}{i}", "category": category, "AGG": 1.0 - i / 10})
        report = tmp_path / "report.json"
        report.write_text(json.dumps({"rows": rows}))
        result = self.run("select-eval", "--report", str(report), "--seed", "1",
                          "--format", "json")
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert set(payload) == {"I", "II"}
        assert len(payload["I"]) == 2

    def test_exit_code_one_on_input_error(self, tmp_path):
        from concise.cli import main
        import sys

        bad = tmp_path / "bad.jsonl"
        bad.write_text("{not json}\n")
        argv = sys.argv
        sys.argv = ["concise", "validate", "--corpus", str(bad)]
        try:
            assert main() == 1
        finally:
            sys.argv = argv
