"""Parse/similarity bridge spoken over stdin/stdout as JSON lines.

Requests: {"kind": "parse", "id": ..., "text": ...} or
{"kind": "similarity", "id": ..., "a": ..., "b": ...}. Each request gets
exactly one response carrying the same id and one of conllu / score / error.
The first output line is a header announcing the backend model.
"""

__version__ = "0.1.0"
