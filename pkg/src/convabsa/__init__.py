"""Toolkit for multimodal conversational aspect-based sentiment analysis.

Covers the corpus data model and its record-per-line format, the full
evaluation suite (element / pair / sextuple / flip scores), deterministic
flip derivation, the chained reasoning pipeline over a pluggable
completion backend, and the dialogue-synthesis helpers.
"""

from .corpus import (
    Corpus,
    CorpusStats,
    corpus_stats,
    parse_corpus,
    serialize_corpus,
    split_corpus,
)
from .dialogue import (
    AnnotatedDialogue,
    Attachment,
    Dialogue,
    Element,
    Finding,
    FlipRecord,
    Manner,
    Modality,
    Sentiment,
    Sextuple,
    Span,
    SpanError,
    TriggerType,
    Utterance,
    ValidationReport,
    cross_utterance_distance,
    span_text,
    validate_annotations,
    validate_structure,
)
from .flips import DerivedFlip, check_flip_consistency, derive_flips
from .metrics import (
    PRF,
    FlipScoreReport,
    ScoreReport,
    ScoringError,
    cohen_kappa,
    element_f1,
    flip_scores,
    match_tuples,
    normalize_term,
    pair_f1,
    proportional_overlap,
    score_corpus,
    sentiment_macro_f1,
    sextuple_f1,
)
from .synthesis import (
    build_generation_prompt,
    elect_candidate,
    parse_generated_dialogue,
    retrieval_rank,
)

__version__ = "0.1.0"
