"""Self-contained heuristic English dependency parser emitting CoNLL-U.

This is the bridge's default backend: a deterministic closed-class tagger
plus attachment rules. It trades linguistic coverage for zero dependencies
and reproducibility; swap in a real parser by pointing the server at another
backend. Output is always a valid single-root tree.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

_PUNCT = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")

DETS = {
    "the", "a", "an", "this", "these", "those", "my", "your", "his",
    "her", "its", "our", "their", "some", "any", "each", "every", "no",
    "another", "such",
}
AUXES = {
    "is", "are", "was", "were", "be", "been", "being", "am",
    "have", "has", "had", "having", "do", "does", "did",
    "will", "would", "can", "could", "may", "might", "shall", "should", "must",
}
BE_FORMS = {"is", "are", "was", "were", "be", "been", "being", "am"}
ADPS = {
    "in", "on", "at", "by", "for", "with", "from", "of", "into", "about",
    "over", "under", "between", "among", "after", "before", "during",
    "through", "around", "against", "without", "within", "via", "upon",
    "toward", "towards", "across", "near", "off", "onto", "per",
}
PRONS = {
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them",
    "someone", "anyone", "everyone", "nobody", "somebody", "something",
    "anything", "nothing", "everything", "who", "whom", "what", "one",
    "myself", "yourself", "himself", "herself", "itself", "themselves",
}
CCONJS = {"and", "or", "but", "nor", "yet"}
SCONJS = {
    "because", "although", "though", "while", "when", "since", "if",
    "whether", "unless", "that", "which", "until", "whereas", "so",
}
ADVS = {
    "not", "n't", "very", "also", "often", "never", "always", "again",
    "too", "then", "now", "here", "there", "still", "just", "even",
    "already", "soon", "however", "rather", "quite",
}
ADJ_WORDS = {
    "several", "many", "few", "much", "more", "most", "less", "least",
    "other", "own", "same", "new", "old", "good", "bad", "long", "short",
    "high", "low", "big", "small", "large", "great", "different",
    "important", "necessary", "possible", "available", "several",
    "whole", "certain", "free", "full", "early", "late", "strong", "weak",
    "better", "best", "worse", "worst", "fine", "main", "real", "next",
    "last", "first", "second", "third",
}
NUM_WORDS = {
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "hundred", "thousand", "million", "billion",
}

VERB_LEMMAS = {
    "be", "have", "do", "say", "make", "go", "take", "come", "see", "know",
    "get", "give", "find", "tell", "think", "call", "try", "ask", "need",
    "feel", "leave", "put", "mean", "keep", "let", "begin", "show", "hear",
    "play", "run", "move", "like", "live", "believe", "hold", "bring",
    "happen", "write", "provide", "sit", "stand", "lose", "pay", "meet",
    "include", "continue", "set", "learn", "change", "lead", "understand",
    "watch", "follow", "stop", "create", "speak", "read", "allow", "add",
    "spend", "grow", "open", "walk", "win", "offer", "remember", "love",
    "consider", "appear", "buy", "wait", "serve", "send", "expect", "build",
    "stay", "fall", "cut", "reach", "remain", "suggest", "raise", "pass",
    "sell", "require", "report", "decide", "pull", "push", "issue",
    "publish", "review", "study", "influence", "schedule", "announce",
    "observe", "examine", "revise", "delete", "replace", "rewrite", "edit",
    "contain", "deliver", "improve", "reduce", "increase", "produce",
    "depart", "reveal", "forward", "contact", "renew", "hurry", "outline",
    "convey", "tout", "imagine", "fine", "prompt", "engage", "surround",
    "check", "confirm", "submit", "determine", "embark", "use", "work",
    "help", "want", "look", "seem", "turn", "start", "might", "score",
    "cover", "state", "drop", "carry", "accept", "cause", "prove",
}
IRREGULAR_LEMMA = {
    "was": "be", "were": "be", "been": "be", "being": "be", "is": "be",
    "are": "be", "am": "be", "has": "have", "had": "have", "having": "have",
    "did": "do", "does": "do", "done": "do", "doing": "do",
    "went": "go", "gone": "go", "said": "say", "made": "make",
    "took": "take", "taken": "take", "came": "come", "saw": "see",
    "seen": "see", "knew": "know", "known": "know", "got": "get",
    "gave": "give", "given": "give", "found": "find", "told": "tell",
    "thought": "think", "felt": "feel", "left": "leave", "kept": "keep",
    "began": "begin", "begun": "begin", "showed": "show", "shown": "show",
    "heard": "hear", "held": "hold", "brought": "bring", "wrote": "write",
    "written": "write", "sat": "sit", "stood": "stand", "lost": "lose",
    "paid": "pay", "met": "meet", "led": "lead", "spoke": "speak",
    "spoken": "speak", "spent": "spend", "grew": "grow", "grown": "grow",
    "won": "win", "bought": "buy", "sent": "send", "built": "build",
    "fell": "fall", "fallen": "fall", "ran": "run", "sold": "sell",
}
NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence",
                 "ship", "ism", "ure", "age", "ist", "ion")
ADJ_SUFFIXES = ("ous", "ful", "ive", "less", "able", "ible", "ic", "ical")


@dataclass
class Word:
    index: int  # 1-based
    form: str
    lower: str
    upos: str = "NOUN"
    lemma: str = ""
    head: int = 0
    deprel: str = "dep"


def word_tokenize(text: str) -> list[str]:
    out: list[str] = []
    for chunk in text.split():
        head, tail = [], []
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
    return out


def _verb_lemma(lower: str) -> str | None:
    if lower in IRREGULAR_LEMMA:
        return IRREGULAR_LEMMA[lower]
    if lower in VERB_LEMMAS:
        return lower
    for suffix in ("ing", "ed", "es", "s"):
        if lower.endswith(suffix) and len(lower) > len(suffix) + 1:
            stem = lower[: -len(suffix)]
            for candidate in (stem, stem + "e", stem[:-1] if stem[-1:] == stem[-2:-1] else stem):
                if candidate in VERB_LEMMAS:
                    return candidate
    return None


def _noun_lemma(lower: str) -> str:
    if lower.endswith("ies") and len(lower) > 4:
        return lower[:-3] + "y"
    if lower.endswith("ses") or lower.endswith("xes") or lower.endswith("ches") or lower.endswith("shes"):
        return lower[:-2]
    if lower.endswith("s") and not lower.endswith("ss") and len(lower) > 3:
        return lower[:-1]
    return lower


def _tag(words: list[Word]) -> None:
    for i, w in enumerate(words):
        lower = w.lower
        nxt = words[i + 1].lower if i + 1 < len(words) else ""
        if all(ch in _PUNCT for ch in w.form):
            w.upos = "PUNCT"
        elif re.fullmatch(r"\d[\d.,$%]*", w.form) or lower in NUM_WORDS:
            w.upos = "NUM"
        elif lower == "to":
            w.upos = "PART" if _verb_lemma(nxt) or nxt in AUXES else "ADP"
        elif lower in AUXES:
            w.upos = "AUX"
        elif lower in DETS:
            w.upos = "DET"
        elif lower in ADPS:
            w.upos = "ADP"
        elif lower in PRONS:
            w.upos = "PRON"
        elif lower in CCONJS:
            w.upos = "CCONJ"
        elif lower in SCONJS:
            w.upos = "SCONJ"
        elif lower in ADVS or (lower.endswith("ly") and len(lower) > 3):
            w.upos = "ADV"
        elif lower in ADJ_WORDS:
            w.upos = "ADJ"
        elif _verb_lemma(lower):
            w.upos = "VERB"
        elif lower.endswith(ADJ_SUFFIXES):
            w.upos = "ADJ"
        elif lower.endswith(NOUN_SUFFIXES):
            w.upos = "NOUN"
        elif i > 0 and w.form[:1].isupper():
            w.upos = "PROPN"
        else:
            w.upos = "NOUN"

    # noun/verb homographs: a determiner, adjective, numeral, or preposition
    # right before the word signals a nominal reading ("several reviews")
    for i, w in enumerate(words):
        if w.upos == "VERB" and i > 0 and words[i - 1].upos in ("DET", "ADJ", "NUM", "ADP"):
            w.upos = "NOUN"

    for w in words:
        if w.upos in ("VERB", "AUX"):
            w.lemma = _verb_lemma(w.lower) or w.lower
        elif w.upos in ("NOUN", "PROPN"):
            w.lemma = _noun_lemma(w.lower)
        else:
            w.lemma = w.lower


def _find_verb_group(words: list[Word]) -> tuple[int, int, bool]:
    """(group start, main verb index, passive) over 0-based positions; -1 if none."""
    i = 0
    while i < len(words):
        if words[i].upos in ("AUX", "VERB"):
            start = i
            j = i
            main = -1
            saw_be = False
            while j < len(words) and words[j].upos in ("AUX", "VERB", "ADV", "PART"):
                if words[j].upos == "VERB":
                    main = j
                if words[j].upos == "AUX" and words[j].lower in BE_FORMS:
                    saw_be = True
                j += 1
            if main == -1:
                # copular/auxiliary-only group: the last aux heads the clause
                main = j - 1
                while words[main].upos not in ("AUX", "VERB"):
                    main -= 1
            passive = saw_be and words[main].upos == "VERB" and (
                words[main].lower.endswith("ed")
                or words[main].lower.endswith("en")
                or words[main].lower in IRREGULAR_LEMMA
            )
            return start, main, passive
        i += 1
    return -1, -1, False


def _next_nominal(words: list[Word], start: int) -> int:
    for j in range(start, len(words)):
        if words[j].upos in ("NOUN", "PROPN", "PRON", "NUM"):
            return j
    return -1


def _prev_nominal(words: list[Word], start: int) -> int:
    for j in range(start, -1, -1):
        if words[j].upos in ("NOUN", "PROPN"):
            return j
    return -1


def parse(text: str) -> list[Word]:
    """Tag and attach; returns [] for blank input."""
    forms = word_tokenize(text)
    if not forms:
        return []
    words = [Word(index=i + 1, form=f, lower=f.casefold()) for i, f in enumerate(forms)]
    _tag(words)

    group_start, root, passive = _find_verb_group(words)
    if root == -1:
        root = _prev_nominal(words, len(words) - 1)
        if root == -1:
            root = 0
    words[root].head = 0
    words[root].deprel = "root"

    subject = -1
    if group_start > 0:
        for j in range(group_start - 1, -1, -1):
            if words[j].upos in ("NOUN", "PROPN", "PRON"):
                subject = j
                break

    seen_object = False
    for i, w in enumerate(words):
        if i == root:
            continue
        if i == subject:
            w.head = root + 1
            w.deprel = "nsubjpass" if passive else "nsubj"
            continue
        if w.upos == "PUNCT":
            w.head = root + 1
            w.deprel = "punct"
            continue
        if w.upos == "DET":
            j = _next_nominal(words, i + 1)
            w.head = (j if j != -1 else root) + 1
            w.deprel = "det"
            continue
        if w.upos == "NUM":
            j = _next_nominal(words, i + 1)
            if j != -1 and words[j].upos != "NUM":
                w.head = j + 1
                w.deprel = "nummod"
            else:
                w.head = root + 1
                w.deprel = "nummod"
            continue
        if w.upos == "ADJ":
            j = _next_nominal(words, i + 1)
            if j != -1:
                w.head = j + 1
                w.deprel = "amod"
            else:
                w.head = root + 1
                w.deprel = "acomp"
            continue
        if w.upos == "ADV":
            w.head = root + 1
            w.deprel = "advmod" if i != root else "dep"
            continue
        if w.upos == "PART":
            j = i + 1
            w.head = (j if j < len(words) else root) + 1
            w.deprel = "mark"
            continue
        if w.upos == "AUX":
            if group_start <= i < root:
                w.head = root + 1
                w.deprel = "auxpass" if passive and words[i].lower in BE_FORMS and i == root - 1 else "aux"
            else:
                w.head = root + 1
                w.deprel = "aux"
            continue
        if w.upos == "ADP":
            j = _prev_nominal(words, i - 1)
            if j == -1 or j < root:
                w.head = root + 1
            else:
                w.head = j + 1
            w.deprel = "prep"
            continue
        if w.upos in ("CCONJ", "SCONJ"):
            w.head = root + 1
            w.deprel = "cc" if w.upos == "CCONJ" else "mark"
            continue
        if w.upos in ("NOUN", "PROPN", "PRON"):
            # object of a preceding preposition, else clause object or chain
            k = i - 1
            while k > 0 and words[k].upos in ("DET", "ADJ", "NUM", "ADV", "PROPN", "NOUN"):
                k -= 1
            if k >= 0 and words[k].upos == "ADP":
                w.head = k + 1
                w.deprel = "pobj"
            elif i < root:
                j = _next_nominal(words, i + 1)
                if j != -1 and j < root and words[j].upos in ("NOUN", "PROPN"):
                    w.head = j + 1
                    w.deprel = "compound"
                else:
                    w.head = root + 1
                    w.deprel = "dep"
            elif words[i - 1].upos in ("NOUN", "PROPN") and i - 1 != root:
                w.head = i  # flat continuation of a name or compound
                w.deprel = "flat" if w.upos == "PROPN" else "conj"
            elif not seen_object:
                w.head = root + 1
                w.deprel = "dobj"
                seen_object = True
            else:
                w.head = root + 1
                w.deprel = "dep"
            continue
        if w.upos == "VERB":
            w.head = root + 1
            w.deprel = "xcomp" if i > root else "dep"
            continue
        w.head = root + 1
        w.deprel = "dep"

    _break_cycles(words, root)
    return words


def _break_cycles(words: list[Word], root: int) -> None:
    # attachment rules are nearly cycle-free; anything that loops reattaches
    # to the root so the output is always a tree
    for w in words:
        seen = set()
        cur = w.index
        while cur != 0:
            if cur in seen:
                w.head = root + 1
                if w.index == root + 1:
                    w.head = 0
                break
            seen.add(cur)
            cur = words[cur - 1].head


def to_conllu(words: list[Word], text: str) -> str:
    if not words:
        return ""
    lines = [f"# text = {text}"]
    for w in words:
        lines.append(
            "\t".join(
                (
                    str(w.index), w.form, w.lemma or w.lower, w.upos, "_", "_",
                    str(w.head), w.deprel, "_", "_",
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_to_conllu(text: str) -> str:
    return to_conllu(parse(text), " ".join(word_tokenize(text)))
