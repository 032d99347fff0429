from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concise.conllu import DepNode, DepTree, linearize
from concise.synthesize import (
    GraftError,
    GraftJob,
    MixSource,
    MixSpec,
    SynthesisRecord,
    eligible_targets,
    filter_synthesis,
    graft,
    graft_with_flags,
    inflect,
    mix_datasets,
    select_target,
    strip_parenthetical,
    synthesize_sentence,
)
from concise.wordnet import ADJ, NOUN, VERB, Synset


def node(i, form, head, deprel, upos="X", lemma=None):
    return DepNode(id=i, form=form, lemma=lemma or form.lower(), upos=upos,
                   head=head, deprel=deprel)


def chain(forms, upos="NOUN"):
    nodes = [node(1, forms[0], 0, "root", upos)]
    nodes += [node(i, f, i - 1, "dep", upos) for i, f in enumerate(forms[1:], 2)]
    return DepTree(tuple(nodes))


PUBLISH_SENSE = Synset(
    offset=100101, pos=VERB, lemmas=("publish", "write"),
    gloss="have (one's work) issued for publication",
)


@pytest.fixture
def passive_tree(grafting_trees):
    return grafting_trees[0]


@pytest.fixture
def gloss_tree(grafting_trees):
    return grafting_trees[1]


class TestStripParenthetical:
    def test_paper_gloss(self):
        assert (
            strip_parenthetical("have (one's work) issued for publication")
            == "have issued for publication"
        )

    def test_no_parens_unchanged(self):
        assert strip_parenthetical("plain text") == "plain text"

    def test_leading_note(self):
        assert strip_parenthetical("(used of persons) having lived long") == "having lived long"


class TestSelectTarget:
    def test_passive_sentence_offers_the_main_verb(self, passive_tree, mini_wordnet):
        ids = eligible_targets(passive_tree, mini_wordnet)
        assert 5 in ids  # "published"
        assert select_target(passive_tree, mini_wordnet, seed=1) in ids

    def test_collocation_start_excluded(self, mini_wordnet):
        tree = DepTree((
            node(1, "the", 4, "det", "DET"),
            node(2, "United", 3, "amod", "ADJ", "united"),
            node(3, "Kingdom", 4, "nsubj", "NOUN", "kingdom"),
            node(4, "announced", 0, "root", "VERB", "announce"),
            node(5, "reforms", 4, "obj", "NOUN", "reform"),
        ))
        ids = eligible_targets(tree, mini_wordnet)
        assert 2 not in ids
        assert {3, 4, 5} <= set(ids)

    def test_common_words_excluded(self, mini_wordnet):
        tree = DepTree((
            node(1, "the", 2, "det", "DET"),
            node(2, "man", 3, "nsubj", "NOUN"),
            node(3, "is", 0, "root", "AUX", "be"),
            node(4, "old", 3, "xcomp", "ADJ"),
        ))
        # "man" and "old" are in the common-words list; "is"/"the" wrong POS
        assert select_target(tree, mini_wordnet, seed=0) is None

    def test_seed_determinism(self, passive_tree, mini_wordnet):
        picks = {select_target(passive_tree, mini_wordnet, seed=9) for _ in range(5)}
        assert len(picks) == 1


class TestInflect:
    @pytest.mark.parametrize(
        "lemma,form,expected",
        [
            ("study", "gerund", "studying"),
            ("run", "gerund", "running"),
            ("be", "gerund", "being"),
            ("make", "gerund", "making"),
            ("die", "gerund", "dying"),
            ("see", "gerund", "seeing"),
            ("have", "past", "had"),
            ("have", "third_singular", "has"),
            ("study", "past", "studied"),
            ("stop", "past", "stopped"),
            ("issue", "past", "issued"),
            ("go", "third_singular", "goes"),
            ("watch", "third_singular", "watches"),
            ("review", "plural", "reviews"),
            ("study", "plural", "studies"),
            ("child", "plural", "children"),
            ("boxes", "singular", "box"),
            ("studies", "singular", "study"),
            ("children", "singular", "child"),
            ("reviews", "singular", "review"),
        ],
    )
    def test_forms(self, lemma, form, expected):
        assert inflect(lemma, form) == expected

    def test_unknown_form_rejected(self):
        with pytest.raises(ValueError, match="unknown inflection form"):
            inflect("walk", "subjunctive")


class TestGraft:
    def test_golden_passive_expansion(self, passive_tree, gloss_tree):
        job = GraftJob(passive_tree, target_index=5, sense=PUBLISH_SENSE,
                       gloss_tree=gloss_tree)
        out = graft(job)
        assert linearize(out).text() == "Several reviews have been had issued for publication"
        assert len(out) == len(passive_tree) - 1 + len(gloss_tree)

    def test_single_token_noun_substitution(self, mini_wordnet):
        tree = DepTree((
            node(1, "the", 2, "det", "DET"),
            node(2, "outcome", 3, "nsubj", "NOUN"),
            node(3, "matters", 0, "root", "VERB", "matter"),
        ))
        gloss = DepTree((node(1, "result", 0, "root", "NOUN"),))
        sense = Synset(offset=201011, pos=NOUN, lemmas=("outcome",), gloss="result")
        out = graft(GraftJob(tree, 2, sense, gloss))
        assert linearize(out).text() == "the result matters"

    def test_verb_to_verb_hand_trace(self):
        # "she examined evidence" with "examined" -> gloss "look at closely"
        tree = DepTree((
            node(1, "she", 2, "nsubj", "PRON"),
            node(2, "examined", 0, "root", "VERB", "examine"),
            node(3, "evidence", 2, "obj", "NOUN"),
        ))
        gloss = DepTree((
            node(1, "look", 0, "root", "VERB"),
            node(2, "at", 1, "case", "ADP"),
            node(3, "closely", 1, "advmod", "ADV"),
        ))
        sense = Synset(offset=1, pos=VERB, lemmas=("examine",), gloss="look at closely")
        out, flags = graft_with_flags(GraftJob(tree, 2, sense, gloss))
        # hand trace: children (she, evidence) move onto "look", which takes
        # the target's slot and its past tense
        assert linearize(out).text() == "she looked at closely evidence"
        assert out.node(out.root_id).form == "looked"

    def test_noun_slot_verb_gloss_takes_gerund(self):
        tree = DepTree((
            node(1, "the", 2, "det", "DET"),
            node(2, "formation", 0, "root", "NOUN"),
        ))
        gloss = DepTree((
            node(1, "form", 0, "root", "VERB"),
            node(2, "something", 1, "obj", "NOUN"),
        ))
        sense = Synset(offset=201213, pos=NOUN, lemmas=("formation",), gloss="form something")
        out = graft(GraftJob(tree, 2, sense, gloss))
        assert [n.form for n in sorted(out.nodes, key=lambda n: n.id)] == [
            "the", "forming", "something",
        ]

    def test_plural_agreement_on_noun_gloss(self):
        tree = DepTree((
            node(1, "rules", 2, "nsubj", "NOUN", "rule"),
            node(2, "apply", 0, "root", "VERB"),
        ))
        gloss = DepTree((node(1, "regulation", 0, "root", "NOUN"),))
        sense = Synset(offset=201112, pos=NOUN, lemmas=("rule",), gloss="regulation")
        out = graft(GraftJob(tree, 1, sense, gloss))
        assert sorted(n.form for n in out.nodes) == ["apply", "regulations"]

    def test_duplicate_determiner_removed(self):
        tree = DepTree((
            node(1, "the", 2, "det", "DET"),
            node(2, "dessert", 0, "root", "NOUN"),
        ))
        gloss = DepTree((
            node(1, "a", 2, "det", "DET"),
            node(2, "dish", 0, "root", "NOUN"),
        ))
        sense = Synset(offset=200606, pos=NOUN, lemmas=("dessert",), gloss="a dish")
        out = graft(GraftJob(tree, 2, sense, gloss))
        assert [n.form for n in sorted(out.nodes, key=lambda n: n.id)] == ["the", "dish"]

    def test_adjective_gloss_is_post_attributive(self):
        tree = DepTree((
            node(1, "a", 3, "det", "DET"),
            node(2, "verbose", 3, "amod", "ADJ"),
            node(3, "report", 0, "root", "NOUN"),
        ))
        gloss = DepTree((
            node(1, "using", 0, "root", "VERB", "use"),
            node(2, "too", 3, "advmod", "ADV"),
            node(3, "many", 4, "amod", "ADJ"),
            node(4, "words", 1, "obj", "NOUN", "word"),
        ))
        sense = Synset(offset=300505, pos="ADJ-S", lemmas=("verbose",),
                       gloss="using too many words")
        out = graft(GraftJob(tree, 2, sense, gloss))
        assert linearize(out).text() == "a report using too many words"

    def test_unsupported_pattern_rejected(self, passive_tree):
        gloss = DepTree((node(1, "quickly", 0, "root", "ADV"),))
        sense = Synset(offset=1, pos=VERB, lemmas=("publish",), gloss="quickly")
        with pytest.raises(GraftError, match="unsupported pattern: VERB -> ADV"):
            graft(GraftJob(passive_tree, 5, sense, gloss))

    def test_intransitive_gloss_root_gains_preposition(self):
        tree = DepTree((
            node(1, "she", 2, "nsubj", "PRON"),
            node(2, "examined", 0, "root", "VERB", "examine"),
            node(3, "evidence", 2, "obj", "NOUN"),
        ))
        gloss = DepTree((node(1, "look", 0, "root", "VERB"),))
        sense = Synset(offset=1, pos=VERB, lemmas=("examine",), gloss="look")
        out, flags = graft_with_flags(GraftJob(tree, 2, sense, gloss))
        assert "preposition_added" in flags
        assert linearize(out).text() == "she looked at evidence"

    @given(
        st.integers(min_value=2, max_value=6),
        st.integers(min_value=1, max_value=4),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=80, deadline=None)
    def test_node_conservation_and_validity_fuzz(self, n_sent, n_gloss, rng):
        sent_nodes = [node(1, "w1", 0, "root", "VERB", "w1")]
        for i in range(2, n_sent + 1):
            sent_nodes.append(
                node(i, f"w{i}", rng.randint(1, i - 1), "dep",
                     rng.choice(["NOUN", "VERB", "DET", "ADV"]), f"w{i}")
            )
        tree = DepTree(tuple(sent_nodes))
        gloss_nodes = [node(1, "g1", 0, "root", "NOUN", "g1")]
        for i in range(2, n_gloss + 1):
            gloss_nodes.append(node(i, f"g{i}", rng.randint(1, i - 1), "dep", "X", f"g{i}"))
        gloss = DepTree(tuple(gloss_nodes))
        targets = [n.id for n in sent_nodes if n.upos == "NOUN"]
        if not targets:
            return
        target = rng.choice(targets)
        sense = Synset(offset=7, pos=NOUN, lemmas=("x",), gloss="y")
        out = graft(GraftJob(tree, target, sense, gloss))  # constructor validates
        assert len(out) == len(tree) - 1 + len(gloss)


def make_chain_pair(n, head_mismatches, label_mismatches=0):
    forms = [f"w{i}" for i in range(n)]
    a = chain(forms)
    nodes = list(a.nodes)
    for k in range(head_mismatches):
        i = n - 1 - k
        new_head = 1 if nodes[i].head != 1 else max(1, i - 2)
        nodes[i] = DepNode(id=i + 1, form=f"w{i}", lemma=f"w{i}", upos="NOUN",
                           head=new_head, deprel="dep")
    for k in range(label_mismatches):
        i = 1 + k
        nodes[i] = DepNode(id=i + 1, form=f"w{i}", lemma=f"w{i}", upos="NOUN",
                           head=nodes[i].head, deprel="obj")
    return a, DepTree(tuple(nodes))


class TestFilterSynthesis:
    def rec(self):
        return SynthesisRecord(original="a", inflated="b", verdict="pending")

    def test_identical_trees_kept(self):
        a, b = make_chain_pair(10, 0)
        out = filter_synthesis(self.rec(), a, b, similarity=0.95)
        assert out.verdict == "kept"
        assert out.reason is None

    def test_four_mismatches_dropped(self):
        a, b = make_chain_pair(10, 4)
        out = filter_synthesis(self.rec(), a, b)
        assert (out.verdict, out.reason) == ("dropped", "reparse_mismatch")

    def test_three_mismatches_with_low_accuracy_dropped(self):
        a, b = make_chain_pair(28, 3)  # accuracy 25/28 < 0.9
        out = filter_synthesis(self.rec(), a, b)
        assert (out.verdict, out.reason) == ("dropped", "reparse_accuracy")

    def test_three_mismatches_at_accuracy_bound_kept(self):
        a, b = make_chain_pair(30, 3)  # accuracy exactly 0.9
        out = filter_synthesis(self.rec(), a, b, similarity=0.9)
        assert out.verdict == "kept"

    def test_similarity_boundary_inclusive_drop(self):
        a, b = make_chain_pair(10, 0)
        out = filter_synthesis(self.rec(), a, b, similarity=0.82)
        assert (out.verdict, out.reason) == ("dropped", "low_similarity")

    def test_similarity_just_above_boundary_kept(self):
        a, b = make_chain_pair(10, 0)
        out = filter_synthesis(self.rec(), a, b, similarity=0.83)
        assert out.verdict == "kept"

    def test_no_scorer_flags_unfiltered(self):
        a, b = make_chain_pair(10, 0)
        out = filter_synthesis(self.rec(), a, b, similarity=None)
        assert out.verdict == "kept"
        assert "similarity_unfiltered" in out.flags

    def test_monotone_in_mismatch_threshold(self):
        a, b = make_chain_pair(40, 2)
        loose = filter_synthesis(self.rec(), a, b, similarity=0.9, max_mismatches=3)
        tight = filter_synthesis(self.rec(), a, b, similarity=0.9, max_mismatches=1)
        assert loose.verdict == "kept"
        assert tight.verdict == "dropped"


class TestSynthesizeSentence:
    def test_deterministic_end_to_end(self, passive_tree, mini_wordnet, gloss_tree):
        def gloss_parse(sense):
            if "issued for publication" in sense.gloss:
                return gloss_tree
            return None

        runs = [
            synthesize_sentence(passive_tree, mini_wordnet, gloss_parse, seed=3)
            for _ in range(3)
        ]
        assert len({linearize(t).text() for t, _, _ in runs if t}) == 1

    def test_no_candidate(self, mini_wordnet):
        tree = DepTree((node(1, "the", 2, "det", "DET"), node(2, "is", 0, "root", "AUX", "be")))
        out, reason, _ = synthesize_sentence(tree, mini_wordnet, lambda s: None)
        assert out is None
        assert reason == "no_candidate"


class TestMixDatasets:
    @pytest.fixture
    def sources(self, tmp_path):
        para = tmp_path / "para.tsv"
        lines = []
        # 6 pairs where the longer side has >= 10 tokens, 4 short ones
        for i in range(6):
            lines.append(
                f"one two three four five six seven eight nine ten {i}\tshort {i}"
            )
        for i in range(4):
            lines.append(f"tiny pair {i}\talso tiny {i}")
        para.write_text("\n".join(lines) + "\n")
        keep = tmp_path / "keep.tsv"
        keep.write_text("a b c\td e f\ng h\ti j\n")
        comp = tmp_path / "comp.tsv"
        comp.write_text("alpha beta gamma\talpha beta\nalpha beta gamma\tzzz\n")
        return para, keep, comp

    def test_min_words_gate_hand_count(self, sources):
        para, keep, comp = sources
        spec = MixSpec((MixSource("para", str(para), "paraphrase", min_words=10),), 0)
        result = mix_datasets(spec)
        assert result.per_source["para"] == (6, 4)
        assert len(result.pairs) == 6

    def test_keep_all_passes_everything(self, sources):
        para, keep, comp = sources
        spec = MixSpec((MixSource("keep", str(keep), "keep_all"),), 0)
        assert mix_datasets(spec).per_source["keep"] == (2, 0)

    def test_similarity_gate_requires_scorer(self, sources):
        para, keep, comp = sources
        spec = MixSpec((MixSource("comp", str(comp), "compression"),), 0)
        with pytest.raises(ValueError, match="similarity filter requires scorer"):
            mix_datasets(spec)

    def test_similarity_gate_with_scorer(self, sources):
        para, keep, comp = sources

        def scorer(a, b):
            return 1.0 if b.startswith("alpha") else 0.2

        spec = MixSpec((MixSource("comp", str(comp), "compression"),), 0)
        result = mix_datasets(spec, scorer)
        assert result.per_source["comp"] == (1, 1)

    def test_shuffle_is_permutation_and_total_adds_up(self, sources):
        para, keep, comp = sources
        spec = MixSpec(
            (
                MixSource("para", str(para), "paraphrase", min_words=10),
                MixSource("keep", str(keep), "keep_all"),
            ),
            shuffle_seed=42,
        )
        result = mix_datasets(spec)
        kept_total = sum(k for k, _ in result.per_source.values())
        assert len(result.pairs) == kept_total == 8
        unshuffled = mix_datasets(
            MixSpec(spec.sources, shuffle_seed=7)
        )
        assert sorted(result.pairs) == sorted(unshuffled.pairs)

    def test_empty_spec(self):
        result = mix_datasets(MixSpec((), 0))
        assert result.pairs == []

    def test_unreadable_source_names_it(self, tmp_path):
        spec = MixSpec((MixSource("ghost", str(tmp_path / "nope.tsv"), "keep_all"),), 0)
        with pytest.raises(ValueError, match="ghost"):
            mix_datasets(spec)
