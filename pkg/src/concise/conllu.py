"""CoNLL-U dependency trees: parsing, validation, serialization, linearization.

Word order is defined by node id, so any tree surgery must end with a
renumbering pass before serializing or linearizing. Columns beyond the six
used for tree construction (ID, FORM, LEMMA, UPOS, HEAD, DEPREL) are carried
opaquely; multiword-token ranges and empty nodes are skipped for the tree but
preserved for round-tripping.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .textcore import TokenSeq

__all__ = [
    "ConlluError",
    "DepNode",
    "DepTree",
    "MismatchReport",
    "parse_conllu",
    "serialize_conllu",
    "linearize",
    "relation_triples",
    "tree_mismatches",
]


class ConlluError(ValueError):
    pass


@dataclass(frozen=True)
class DepNode:
    id: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str
    xpos: str = "_"
    feats: str = "_"
    deps: str = "_"
    misc: str = "_"

    def lemma_or_form(self) -> str:
        return self.lemma if self.lemma not in ("", "_") else self.form.casefold()


@dataclass(frozen=True)
class DepTree:
    nodes: tuple[DepNode, ...]
    comments: tuple[str, ...] = ()
    # raw multiword-range / empty-node lines, anchored before the Nth token line
    extras: tuple[tuple[int, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        _validate(self.nodes)

    @property
    def root_id(self) -> int:
        return next(n.id for n in self.nodes if n.head == 0)

    def node(self, node_id: int) -> DepNode:
        return self._by_id[node_id]

    @property
    def _by_id(self) -> dict[int, DepNode]:
        return {n.id: n for n in self.nodes}

    def children(self, node_id: int) -> list[DepNode]:
        return [n for n in self.nodes if n.head == node_id]

    def subtree_ids(self, node_id: int) -> set[int]:
        """Ids of the node and all its descendants."""
        out = {node_id}
        frontier = [node_id]
        while frontier:
            nid = frontier.pop()
            for child in self.children(nid):
                if child.id not in out:
                    out.add(child.id)
                    frontier.append(child.id)
        return out

    def __len__(self) -> int:
        return len(self.nodes)


def _validate(nodes: Iterable[DepNode]) -> None:
    nodes = tuple(nodes)
    if not nodes:
        raise ConlluError("tree has no nodes")
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        raise ConlluError(f"duplicate node ids: {sorted(ids)}")
    if any(i < 1 for i in ids):
        raise ConlluError("node ids must be >= 1")
    id_set = set(ids)
    roots = [n.id for n in nodes if n.head == 0]
    if not roots:
        raise ConlluError("no root node (head 0)")
    if len(roots) > 1:
        raise ConlluError(f"multiple roots: nodes {roots}")
    for n in nodes:
        if n.head == n.id:
            raise ConlluError(f"self-loop at node {n.id}")
        if n.head != 0 and n.head not in id_set:
            raise ConlluError(f"node {n.id} has unresolved head {n.head}")
    # connectivity: every node must reach the root through head links
    heads = {n.id: n.head for n in nodes}
    for n in nodes:
        seen = set()
        cur = n.id
        while cur != 0:
            if cur in seen:
                raise ConlluError(f"cycle through node {cur}")
            seen.add(cur)
            cur = heads[cur]


def parse_conllu(text: str) -> list[DepTree]:
    """Parse CoNLL-U text into one DepTree per sentence block."""
    trees: list[DepTree] = []
    comments: list[str] = []
    rows: list[tuple[int, DepNode]] = []  # (line number, node)
    extras: list[tuple[int, str]] = []

    def flush() -> None:
        if not rows and not comments and not extras:
            return
        if not rows:
            raise ConlluError("sentence block contains no token lines")
        by_line = {node.id: lineno for lineno, node in rows}
        nodes = tuple(node for _, node in rows)
        # re-raise structural errors with the offending line number
        ids = [n.id for n in nodes]
        for lineno, node in rows:
            if node.head == node.id:
                raise ConlluError(f"self-loop at line {lineno}")
            if node.head != 0 and node.head not in ids:
                raise ConlluError(f"line {lineno}: unresolved head {node.head}")
        roots = [n.id for n in nodes if n.head == 0]
        if not roots:
            raise ConlluError(
                f"line {rows[0][0]}: sentence has no root (head 0) token"
            )
        if len(roots) > 1:
            raise ConlluError(
                f"line {by_line[roots[1]]}: multiple roots (first at line {by_line[roots[0]]})"
            )
        heads = {n.id: n.head for n in nodes}
        for lineno, node in rows:
            seen: set[int] = set()
            cur = node.id
            while cur != 0:
                if cur in seen:
                    raise ConlluError(f"line {lineno}: cyclic heads through node {cur}")
                seen.add(cur)
                cur = heads[cur]
        trees.append(DepTree(nodes, tuple(comments), tuple(extras)))
        comments.clear()
        rows.clear()
        extras.clear()

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(
                f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}"
            )
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            extras.append((len(rows), line))
            continue
        try:
            nid = int(token_id)
        except ValueError:
            raise ConlluError(f"line {lineno}: non-integer token id {token_id!r}") from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluError(f"line {lineno}: non-integer head {cols[6]!r}") from None
        rows.append(
            (
                lineno,
                DepNode(
                    id=nid,
                    form=cols[1],
                    lemma=cols[2],
                    upos=cols[3],
                    xpos=cols[4],
                    feats=cols[5],
                    head=head,
                    deprel=cols[7],
                    deps=cols[8],
                    misc=cols[9],
                ),
            )
        )
    flush()
    return trees


def serialize_conllu(trees: Iterable[DepTree]) -> str:
    """Serialize trees; inverse of parse_conllu up to whitespace normalization."""
    blocks: list[str] = []
    for tree in trees:
        ordered = sorted(tree.nodes, key=lambda n: n.id)
        if [n.id for n in ordered] != list(range(1, len(ordered) + 1)):
            raise ConlluError(
                f"cannot serialize: node ids are not 1..{len(ordered)} "
                f"(got {[n.id for n in ordered]})"
            )
        extras_at: dict[int, list[str]] = {}
        for pos, raw in tree.extras:
            extras_at.setdefault(pos, []).append(raw)
        lines = list(tree.comments)
        for idx, node in enumerate(ordered):
            lines.extend(extras_at.get(idx, ()))
            lines.append(
                "\t".join(
                    (
                        str(node.id),
                        node.form,
                        node.lemma,
                        node.upos,
                        node.xpos,
                        node.feats,
                        str(node.head),
                        node.deprel,
                        node.deps,
                        node.misc,
                    )
                )
            )
        lines.extend(extras_at.get(len(ordered), ()))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def linearize(tree: DepTree) -> TokenSeq:
    """Emit token forms in ascending node-id order."""
    ids = [n.id for n in tree.nodes]
    if len(set(ids)) != len(ids):
        raise ConlluError(f"duplicate node ids: {sorted(ids)}")
    return TokenSeq.from_tokens(n.form for n in sorted(tree.nodes, key=lambda n: n.id))


def relation_triples(tree: DepTree) -> Counter:
    """Multiset of (head_lemma, deprel, dependent_lemma); the root hangs off "ROOT"."""
    by_id = {n.id: n for n in tree.nodes}
    triples: Counter = Counter()
    for node in tree.nodes:
        head_lemma = "ROOT" if node.head == 0 else by_id[node.head].lemma_or_form()
        triples[(head_lemma, node.deprel, node.lemma_or_form())] += 1
    return triples


class MismatchReport(NamedTuple):
    mismatches: int
    accuracy: float


def tree_mismatches(a: DepTree, b: DepTree, labeled: bool = True) -> MismatchReport:
    """Positionwise (head, deprel) disagreement between two parses of one sentence."""
    a_nodes = sorted(a.nodes, key=lambda n: n.id)
    b_nodes = sorted(b.nodes, key=lambda n: n.id)
    if [n.form for n in a_nodes] != [n.form for n in b_nodes]:
        raise ConlluError("token mismatch: trees are not parses of the same forms")
    mismatches = 0
    for x, y in zip(a_nodes, b_nodes):
        if x.head != y.head or (labeled and x.deprel != y.deprel):
            mismatches += 1
    return MismatchReport(mismatches, (len(a_nodes) - mismatches) / len(a_nodes))
