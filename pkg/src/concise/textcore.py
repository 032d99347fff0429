"""Word-level text primitives: tokenization, stemming, alignment, edit rates.

Everything here operates on whitespace-style tokens with a deterministic
normalized form (casefolded, edge punctuation stripped). Token equality for
alignment and edit distances is always on the normalized form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "Token",
    "TokenSeq",
    "EditOp",
    "EditScript",
    "tokenize",
    "normalize_token",
    "porter_stem",
    "levenshtein",
    "lcs_align",
    "word_error_rate",
    "translation_edit_rate",
    "TerScore",
]

# Edge punctuation split off by the tokenizer and stripped by normalization.
_PUNCT = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~") | set("‘’“”–—…")

# tercom-style limits for the shift search
_MAX_SHIFT_SIZE = 10
_MAX_SHIFT_DIST = 50


def normalize_token(surface: str) -> str:
    """Casefold and strip edge punctuation; pure-punctuation tokens keep their casefold."""
    folded = surface.casefold()
    stripped = folded.strip("".join(_PUNCT))
    return stripped or folded


@dataclass(frozen=True)
class Token:
    surface: str
    norm: str


@dataclass(frozen=True)
class TokenSeq:
    """An immutable word-level sequence; equality-relevant forms in ``norms``."""

    surfaces: tuple[str, ...]
    norms: tuple[str, ...]

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "TokenSeq":
        surfaces = tuple(tokens)
        return cls(surfaces, tuple(normalize_token(t) for t in surfaces))

    def __len__(self) -> int:
        return len(self.surfaces)

    def __iter__(self) -> Iterator[str]:
        return iter(self.surfaces)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return TokenSeq(self.surfaces[index], self.norms[index])
        return Token(self.surfaces[index], self.norms[index])

    def __bool__(self) -> bool:
        return bool(self.surfaces)

    def text(self) -> str:
        return " ".join(self.surfaces)


def tokenize(text: str) -> TokenSeq:
    """Whitespace split with leading/trailing punctuation split into separate tokens."""
    out: list[str] = []
    for chunk in text.split():
        head: list[str] = []
        tail: list[str] = []
        while chunk and chunk[0] in _PUNCT:
            head.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in _PUNCT:
            tail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(head)
        if chunk:
            out.append(chunk)
        out.extend(reversed(tail))
    return TokenSeq.from_tokens(out)


# ---------------------------------------------------------------------------
# Porter (1980) stemmer
# ---------------------------------------------------------------------------

def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in "aeiou":
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    # number of VC sequences in [C](VC)^m[V]
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    # *o condition: final cvc where the last consonant is not w, x or y
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _rule_set(word: str, rules: list[tuple[str, str, int]]) -> str:
    # longest matching suffix decides the rule; its measure condition then gates it
    match = None
    for suffix, repl, min_m in rules:
        if word.endswith(suffix) and (match is None or len(suffix) > len(match[0])):
            match = (suffix, repl, min_m)
    if match is None:
        return word
    suffix, repl, min_m = match
    stem = word[: len(word) - len(suffix)]
    if _measure(stem) > min_m:
        return stem + repl
    return word


_STEP2 = [
    ("ational", "ate", 0), ("tional", "tion", 0), ("enci", "ence", 0),
    ("anci", "ance", 0), ("izer", "ize", 0), ("abli", "able", 0),
    ("alli", "al", 0), ("entli", "ent", 0), ("eli", "e", 0),
    ("ousli", "ous", 0), ("ization", "ize", 0), ("ation", "ate", 0),
    ("ator", "ate", 0), ("alism", "al", 0), ("iveness", "ive", 0),
    ("fulness", "ful", 0), ("ousness", "ous", 0), ("aliti", "al", 0),
    ("iviti", "ive", 0), ("biliti", "ble", 0),
]

_STEP3 = [
    ("icate", "ic", 0), ("ative", "", 0), ("alize", "al", 0),
    ("iciti", "ic", 0), ("ical", "ic", 0), ("ful", "", 0), ("ness", "", 0),
]

_STEP4 = [
    ("al", "", 1), ("ance", "", 1), ("ence", "", 1), ("er", "", 1),
    ("ic", "", 1), ("able", "", 1), ("ible", "", 1), ("ant", "", 1),
    ("ement", "", 1), ("ment", "", 1), ("ent", "", 1), ("ou", "", 1),
    ("ism", "", 1), ("ate", "", 1), ("iti", "", 1), ("ous", "", 1),
    ("ive", "", 1), ("ize", "", 1),
]


def porter_stem(token: str) -> str:
    """Porter (1980) stem of a lowercase alphabetic token.

    Tokens of length <= 2 and tokens containing non-alphabetic characters are
    returned unchanged.
    """
    if len(token) <= 2 or not token.isalpha():
        return token
    word = token

    # step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        removed = False
        if word.endswith("ed") and _has_vowel(word[:-2]):
            word = word[:-2]
            removed = True
        elif word.endswith("ing") and _has_vowel(word[:-3]):
            word = word[:-3]
            removed = True
        if removed:
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _rule_set(word, _STEP2)
    word = _rule_set(word, _STEP3)

    # step 4: ION only applies after s or t
    match = None
    for suffix, _, _ in _STEP4:
        if word.endswith(suffix) and (match is None or len(suffix) > len(match)):
            match = suffix
    if word.endswith("ion") and (match is None or len(match) < 3):
        stem = word[:-3]
        if stem.endswith(("s", "t")) and _measure(stem) > 1:
            word = stem
    elif match is not None:
        stem = word[: len(word) - len(match)]
        if _measure(stem) > 1:
            word = stem

    # step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            word = stem

    # step 5b
    if _ends_double_consonant(word) and word.endswith("l") and _measure(word) > 1:
        word = word[:-1]

    return word


# ---------------------------------------------------------------------------
# Alignment and edit distances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EditOp:
    kind: str  # match | substitute | insert | delete | shift
    a: int | None = None  # source index
    b: int | None = None  # target index
    block: tuple[int, int] | None = None  # shift only: half-open source span
    offset: int | None = None  # shift only: destination index


@dataclass(frozen=True)
class EditScript:
    ops: tuple[EditOp, ...]
    cost: int

    def apply(self, source: TokenSeq, target: TokenSeq) -> list[str]:
        """Replay the script; the result must equal the target's tokens."""
        out: list[str] = []
        for op in self.ops:
            if op.kind == "match":
                out.append(source.norms[op.a])
            elif op.kind == "substitute":
                out.append(target.norms[op.b])
            elif op.kind == "insert":
                out.append(target.norms[op.b])
            elif op.kind == "delete":
                pass
            else:
                raise ValueError(f"cannot replay op kind {op.kind!r}")
        return out


def lcs_align(a: TokenSeq, b: TokenSeq) -> EditScript:
    """Longest-common-subsequence alignment; cost = |a| + |b| - 2 * LCS."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a.norms[i] == b.norms[j]:
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    ops: list[EditOp] = []
    i = j = 0
    while i < n and j < m:
        if a.norms[i] == b.norms[j]:
            ops.append(EditOp("match", a=i, b=j))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            ops.append(EditOp("delete", a=i))
            i += 1
        else:
            ops.append(EditOp("insert", b=j))
            j += 1
    ops.extend(EditOp("delete", a=k) for k in range(i, n))
    ops.extend(EditOp("insert", b=k) for k in range(j, m))
    cost = n + m - 2 * table[0][0]
    return EditScript(tuple(ops), cost)


def levenshtein(a: Iterable[str], b: Iterable[str]) -> int:
    """Word-level Levenshtein distance with unit insert/delete/substitute costs."""
    xs, ys = list(a), list(b)
    if len(xs) < len(ys):
        xs, ys = ys, xs
    prev = list(range(len(ys) + 1))
    for i, x in enumerate(xs, start=1):
        cur = [i]
        for j, y in enumerate(ys, start=1):
            cost = 0 if x == y else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def word_error_rate(hyp: TokenSeq, ref: TokenSeq) -> float:
    """Levenshtein(hyp, ref) over |ref|."""
    if not ref:
        raise ValueError("empty reference")
    return levenshtein(hyp.norms, ref.norms) / len(ref)


class TerScore(NamedTuple):
    rate: float
    edits: int


def _block_occurs(block: list[str], ref: list[str]) -> bool:
    n = len(block)
    return any(ref[p : p + n] == block for p in range(len(ref) - n + 1))


def translation_edit_rate(hyp: TokenSeq, ref: TokenSeq) -> TerScore:
    """Translation edit rate with a greedy block-shift search.

    Repeatedly applies the single block shift that most reduces the remaining
    word-level Levenshtein distance (one edit per shift); a block qualifies
    only if it occurs verbatim in the reference. Ties go to the
    leftmost-shortest block and nearest destination.
    """
    if not ref:
        raise ValueError("empty reference")
    h = list(hyp.norms)
    r = list(ref.norms)
    shifts = 0
    cur = levenshtein(h, r)
    # with distance <= 1 a shift cannot lower the total edit count
    while cur > 1:
        best: tuple[int, list[str]] | None = None
        for length in range(1, min(len(h), _MAX_SHIFT_SIZE) + 1):
            for i in range(len(h) - length + 1):
                block = h[i : i + length]
                if not _block_occurs(block, r):
                    continue
                rest = h[:i] + h[i + length :]
                for dest in range(len(rest) + 1):
                    if dest == i or abs(dest - i) > _MAX_SHIFT_DIST:
                        continue
                    cand = rest[:dest] + block + rest[dest:]
                    if cand == h:
                        continue
                    d = levenshtein(cand, r)
                    if d < cur and (best is None or d < best[0]):
                        best = (d, cand)
        if best is None:
            break
        cur, h = best
        shifts += 1
    edits = shifts + cur
    return TerScore(edits / len(r), edits)
