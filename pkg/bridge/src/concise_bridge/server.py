"""JSON-lines request loop over stdin/stdout.

One response per request, same id, in request order. A malformed line gets
an error response (id "?") and the stream keeps serving. The first line
written is a header announcing the backend; CONCISE_BRIDGE_MODEL selects it
(only the built-in backend ships, but the header records whatever ran).
"""
from __future__ import annotations

import json
import os
import sys

from . import __version__
from .parser import parse_to_conllu
from .similarity import similarity

_DEFAULT_MODEL = "builtin-heuristic"


def handle(request: dict) -> dict:
    rid = request.get("id", "?")
    kind = request.get("kind")
    if kind == "parse":
        text = request.get("text")
        if text is None:
            return {"id": rid, "error": "parse request carries no 'text'"}
        return {"id": rid, "conllu": parse_to_conllu(text)}
    if kind == "similarity":
        a, b = request.get("a"), request.get("b")
        if a is None or b is None:
            return {"id": rid, "error": "similarity request needs 'a' and 'b'"}
        return {"id": rid, "score": similarity(a, b)}
    return {"id": rid, "error": f"unknown kind {kind!r}"}


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    model = os.environ.get("CONCISE_BRIDGE_MODEL", _DEFAULT_MODEL)
    header = {"bridge": "concise-bridge", "version": __version__, "model": model}
    stdout.write(json.dumps(header) + "\n")
    stdout.flush()
    for line in stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request is not an object")
        except (json.JSONDecodeError, ValueError) as exc:
            response = {"id": "?", "error": f"malformed request: {exc}"}
        else:
            response = handle(request)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


def main() -> int:
    serve()
    return 0


if __name__ == "__main__":
    sys.exit(main())
