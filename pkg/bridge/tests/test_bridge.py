"""Contract tests: the bridge is exercised as a real subprocess and its
parses must round-trip through the core CoNLL-U parser."""
from __future__ import annotations

import json
import pathlib
import subprocess
import sys
import time

import pytest

from concise.conllu import DepTree, parse_conllu

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
SRC = pathlib.Path(__file__).parent.parent / "src"


@pytest.fixture(scope="module")
def sentences():
    return [
        line for line in (FIXTURES / "sentences.txt").read_text().splitlines()
        if line.strip()
    ]


class Bridge:
    def __init__(self):
        import os

        env = dict(os.environ)
        env["PYTHONPATH"] = str(SRC) + os.pathsep + env.get("PYTHONPATH", "")
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "concise_bridge"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
            env=env,
        )
        self.header = json.loads(self.proc.stdout.readline())

    def send_raw(self, line: str) -> None:
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()

    def read(self) -> dict:
        return json.loads(self.proc.stdout.readline())

    def ask(self, payload: dict) -> dict:
        self.send_raw(json.dumps(payload))
        return self.read()

    def close(self):
        self.proc.stdin.close()
        self.proc.wait(timeout=10)


@pytest.fixture(scope="module")
def bridge():
    b = Bridge()
    yield b
    b.close()


class TestProtocol:
    def test_header_announces_model(self, bridge):
        assert bridge.header["bridge"] == "concise-bridge"
        assert bridge.header["model"]

    def test_response_ids_and_order_preserved(self, bridge):
        for i in range(5):
            bridge.send_raw(json.dumps({"kind": "similarity", "id": f"s{i}", "a": "x", "b": "x"}))
        for i in range(5):
            assert bridge.read()["id"] == f"s{i}"

    def test_malformed_line_gets_error_and_stream_survives(self, bridge):
        bridge.send_raw("{this is not json")
        response = bridge.read()
        assert response["id"] == "?"
        assert "error" in response
        follow_up = bridge.ask({"kind": "similarity", "id": "after", "a": "a", "b": "a"})
        assert follow_up["id"] == "after"
        assert "score" in follow_up

    def test_unknown_kind_is_error(self, bridge):
        response = bridge.ask({"kind": "translate", "id": "k1", "text": "x"})
        assert response["id"] == "k1"
        assert "error" in response

    def test_parse_without_text_is_error(self, bridge):
        response = bridge.ask({"kind": "parse", "id": "k2"})
        assert "error" in response

    def test_exactly_one_payload_field(self, bridge):
        ok = bridge.ask({"kind": "parse", "id": "p", "text": "a small test"})
        assert ("conllu" in ok) + ("score" in ok) + ("error" in ok) == 1


class TestParseContract:
    def test_twenty_sentences_round_trip(self, bridge, sentences):
        start = time.perf_counter()
        assert len(sentences) == 20
        for i, text in enumerate(sentences):
            response = bridge.ask({"kind": "parse", "id": f"p{i}", "text": text})
            assert "conllu" in response, response
            trees = parse_conllu(response["conllu"])  # validates tree-ness
            assert len(trees) == 1
            assert isinstance(trees[0], DepTree)
            assert len(trees[0]) >= len(text.split())
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0
        print(f"ACCEPTANCE bridge contract (20-sentence round-trip): PASS", file=sys.stderr)

    def test_passive_subject_arc(self, bridge):
        response = bridge.ask(
            {"kind": "parse", "id": "pass", "text": "Several reviews have been published"}
        )
        tree = parse_conllu(response["conllu"])[0]
        reviews = next(n for n in tree.nodes if n.form == "reviews")
        assert reviews.deprel == "nsubjpass"
        assert tree.node(reviews.head).form == "published"

    def test_empty_text_yields_empty_block(self, bridge):
        response = bridge.ask({"kind": "parse", "id": "e", "text": ""})
        assert response["conllu"] == ""
        assert parse_conllu(response["conllu"]) == []


class TestSimilarityContract:
    def test_self_similarity_high(self, bridge, sentences):
        for i, text in enumerate(sentences[:5]):
            response = bridge.ask({"kind": "similarity", "id": f"x{i}", "a": text, "b": text})
            assert response["score"] >= 0.99

    def test_symmetry_within_tolerance(self, bridge, sentences):
        for i, (a, b) in enumerate(zip(sentences, sentences[1:])):
            ab = bridge.ask({"kind": "similarity", "id": f"ab{i}", "a": a, "b": b})["score"]
            ba = bridge.ask({"kind": "similarity", "id": f"ba{i}", "a": b, "b": a})["score"]
            assert abs(ab - ba) <= 1e-6
            assert 0.0 <= ab <= 1.0

    def test_self_beats_cross(self, bridge, sentences):
        for i, a in enumerate(sentences[:6]):
            own = bridge.ask({"kind": "similarity", "id": f"o{i}", "a": a, "b": a})["score"]
            for j, b in enumerate(sentences[:6]):
                if i == j:
                    continue
                cross = bridge.ask(
                    {"kind": "similarity", "id": f"c{i}-{j}", "a": a, "b": b}
                )["score"]
                assert own >= cross
