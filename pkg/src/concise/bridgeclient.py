"""Client for the external parse/similarity bridge (JSON lines over stdio).

The bridge is any executable that reads one JSON object per line
({kind: parse, id, text} or {kind: similarity, id, a, b}) and answers with
exactly one of {id, conllu}, {id, score}, or {id, error} per request, in
request order. A bridge may announce itself with one header line (an object
without an ``id``) before the first response.
"""
from __future__ import annotations

import json
import shlex
import subprocess
from typing import Optional

from .conllu import DepTree, parse_conllu

__all__ = ["BridgeError", "BridgeClient"]


class BridgeError(RuntimeError):
    pass


class BridgeClient:
    def __init__(self, command: str):
        self._proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._counter = 0
        self._header: dict | None = None
        self._saw_first_line = False

    @property
    def model_info(self) -> dict | None:
        return self._header

    def _read_line(self) -> dict:
        line = self._proc.stdout.readline()
        if not line:
            raise BridgeError("bridge closed the stream")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeError(f"bridge sent invalid JSON: {line!r} ({exc})") from None

    def _request(self, payload: dict) -> dict:
        self._counter += 1
        payload["id"] = f"q{self._counter}"
        self._proc.stdin.write(json.dumps(payload) + "\n")
        self._proc.stdin.flush()
        response = self._read_line()
        if not self._saw_first_line:
            self._saw_first_line = True
            if "id" not in response:
                self._header = response
                response = self._read_line()
        if response.get("id") != payload["id"]:
            raise BridgeError(
                f"bridge answered id {response.get('id')!r} to request {payload['id']!r}"
            )
        if "error" in response:
            raise BridgeError(f"bridge error: {response['error']}")
        return response

    def parse(self, text: str) -> Optional[DepTree]:
        """Parse one sentence; None for an empty parse."""
        response = self._request({"kind": "parse", "text": text})
        conllu = response.get("conllu")
        if conllu is None:
            raise BridgeError("parse response carries no 'conllu' field")
        trees = parse_conllu(conllu)
        return trees[0] if trees else None

    def similarity(self, a: str, b: str) -> float:
        response = self._request({"kind": "similarity", "a": a, "b": b})
        score = response.get("score")
        if score is None:
            raise BridgeError("similarity response carries no 'score' field")
        return float(score)

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self) -> "BridgeClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
