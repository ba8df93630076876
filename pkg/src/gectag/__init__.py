"""Token-level edit tagging for grammatical error correction.

Preprocessing of sentence pairs into edit tags, iterative decoding of tagger
predictions, and edit-level scoring.
"""

from .alignment import coverage, map_tokens, preprocess_pair, transformations_for_mapping
from .decoder import (
    InferenceTweaks,
    PredictionMatrix,
    apply_tags,
    choose_tags,
    ensemble_average,
    iterate,
)
from .evaluation import EditSpan, EvalScores, extract_edits, score
from .morphology import apply_g, candidate_g, default_noun_exceptions, default_verb_dictionary
from .tags import Tag, TagVocabulary, build_vocabulary, g_transformation_inventory, parse_tag
from .taggers import FileTagger, OracleTagger, UnigramTagger, file_tagger, oracle_tagger, train_unigram

__version__ = "0.1.0"
