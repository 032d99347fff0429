"""Toolkit for sentence-level revision: scoring, categorizing, synthesizing.

Submodules:

- ``textcore``   tokenization, Porter stemming, alignment, WER/TER
- ``conllu``     dependency trees in CoNLL-U, tree surgery primitives
- ``wordnet``    WordNet 3.0 flat-file reader and Lesk disambiguation
- ``metrics``    BLEU/METEOR/ROUGE/SARI/relation-F1 and the concision score
- ``categorize`` revision-pair decomposition and category assignment
- ``synthesize`` gloss grafting, inflection repair, filters, dataset mixing
- ``wordiness``  lexicon-driven wordiness span detection
- ``corpus``     sentence-pair corpus I/O, evaluation reports, sample selection
- ``cli``        the ``concise`` command-line entry point
"""

__version__ = "0.1.0"
