"""Dialogue auto-synthesis: generation prompts, parsing, and retrieval.

Generation goes through the same completion backend as the reasoning
pipeline.  Generated records reuse the corpus record schema; attachment
captions are used to query caption databases, and scored candidates are
elected by averaged annotator ratings.
"""

from __future__ import annotations

import json
import logging
import math
import re
import unicodedata
from collections import Counter
from typing import Callable, Sequence

from .corpus import record_from_dict
from .dialogue import AnnotatedDialogue, ValidationReport

logger = logging.getLogger(__name__)

_MODALITY_CLAUSES = {
    "image": (
        "Use your creativity and content generation skills to add image modalities in "
        "the conversation. The image caption must provide a concrete description of the "
        "visual content, detailing the objects, scenes, or actions depicted in the "
        "image. The caption must be directly related to the utterance content and "
        "should not be vague or abstract. If an image is included, specify 'type' as "
        "'img', 'caption' as the detailed image description, and 'id' as a unique "
        "identifier."
    ),
    "audio": (
        "Use your creativity and content generation skills to add audio modalities in "
        "the conversation. The audio caption must provide a concrete description of the "
        "sound content. The caption must be directly related to the utterance content "
        "and should not be vague or abstract. If an audio clip is included, specify "
        "'type' as 'aud', 'caption' as the detailed audio description, and 'id' as a "
        "unique identifier."
    ),
    "video": (
        "Use your creativity and content generation skills to add video modalities in "
        "the conversation. The video caption must provide a concrete description of the "
        "moving visual content, detailing the objects, scenes, or actions depicted. The "
        "caption must be directly related to the utterance content and should not be "
        "vague or abstract. If a video is included, specify 'type' as 'vid', 'caption' "
        "as the detailed video description, and 'id' as a unique identifier."
    ),
}

_NO_MODALITY_CLAUSE = (
    "Do not include any non-text modalities; set 'modality' to None for every utterance."
)


def build_generation_prompt(
    theme: str,
    speakers: int,
    turns: int,
    modality_plan: Sequence[str] = (),
    sample_record: str = "",
) -> str:
    """Instruction prompt asking a model to synthesize one annotated dialogue."""
    if speakers < 2:
        raise ValueError(f"a dialogue needs at least 2 speakers; got {speakers}")
    if turns < 1:
        raise ValueError(f"a dialogue needs at least 1 turn; got {turns}")
    for kind in modality_plan:
        if kind not in _MODALITY_CLAUSES:
            raise ValueError(f"unknown modality kind: {kind!r}")
    if modality_plan:
        modality_clause = " ".join(_MODALITY_CLAUSES[kind] for kind in modality_plan)
    else:
        modality_clause = _NO_MODALITY_CLAUSE
    points = [
        (
            f"Generate a nonlinear dialogue replying structure among {speakers} "
            f"speakers, and the turns of the dialogue must be {turns}."
        ),
        (
            "Each speaker in the dialogue should have a unique 'speaker_id' and a "
            "unique 'speaker_name', and each dialogue should have a unique 'doc_id'."
        ),
        (
            "The dialogue should revolve around one, two, or three main targets (the "
            "objects being discussed). For these targets, the conversation should "
            "focus on specific aspects (attributes or features of the targets) and "
            "provide an opinion (evaluation of the aspect). Each utterance must "
            "include an opinion about an aspect and be supported by a rationale "
            "(reason or explanation for the opinion)."
        ),
        modality_clause,
        (
            "Every utterance except the first utterance is a reply to dialogue "
            "sentence with index n, the reply property of this utterance should be n, "
            "the first utterance is -1."
        ),
        (
            "The conversation must include all four elements: 'target', 'aspect', "
            "'opinion', and 'rationale'. All elements must be explicitly mentioned in "
            "the dialogue text and marked as 'explicit'."
        ),
        (
            "Store all parts of the conversation in accordance with the provided "
            "example format. For each utterance, the 'modality' should be set to None "
            "or include the 'type', 'caption', and 'id' if a non-text modality is used."
        ),
        (
            "Ensure full comprehension of the provided example and apply it to create "
            "a dialogue that meets all specified criteria, including the proper "
            "integration of multimodal elements. Adhere strictly to the example 'json' "
            "format for organizing the storage structure of the generated dialogue, as "
            "shown in the provided example."
        ),
    ]
    lines = [
        (
            "As an expert playwright skilled in crafting dialogues, your task is to "
            f"generate conversations centered around the theme '{theme}'. Please "
            "comply with the following instructions. Do not comment, judge, or output "
            "other texts and only return the results."
        )
    ]
    lines += [f"{i}. {text}" for i, text in enumerate(points, start=1)]
    lines.append(f"For instance, a sample 'json' output would be: {sample_record}")
    return "\n".join(lines)


_FENCE = re.compile(r"^```[a-zA-Z]*\n(.*)\n```$", re.DOTALL)


def parse_generated_dialogue(completion: str) -> tuple[AnnotatedDialogue | None, ValidationReport]:
    """Parse one generated record, reusing the corpus record rules."""
    report = ValidationReport()
    text = completion.strip()
    fenced = _FENCE.match(text)
    if fenced:
        text = fenced.group(1).strip()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        report.add("bad-json", f"generated dialogue is not valid JSON: {e.msg}")
        return None, report
    ad = record_from_dict(obj, report)
    return ad, report


def _count_vector(text: str) -> Counter:
    return Counter(unicodedata.normalize("NFC", text).casefold().split())


def lexical_cosine(a: str, b: str) -> float:
    """Cosine similarity over casefolded token count vectors."""
    va, vb = _count_vector(a), _count_vector(b)
    if not va or not vb:
        return 0.0
    dot = sum(va[t] * vb[t] for t in va if t in vb)
    if dot == 0:
        return 0.0
    norm = math.sqrt(sum(c * c for c in va.values())) * math.sqrt(
        sum(c * c for c in vb.values())
    )
    return dot / norm


def retrieval_rank(
    query_caption: str,
    candidates: Sequence[tuple[str, str]],
    k: int,
    similarity: Callable[[str, str], float] | None = None,
) -> list[str]:
    """Ids of the top-k candidates by caption similarity, ties by id."""
    if k < 1:
        raise ValueError(f"k must be at least 1; got {k}")
    if not candidates:
        logger.warning("retrieval over an empty candidate pool")
        return []
    similarity = similarity or lexical_cosine
    scored = [(similarity(query_caption, caption), cid) for cid, caption in candidates]
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [cid for _, cid in scored[:k]]


def elect_candidate(
    scores: Sequence[Sequence[float]], scale: tuple[float, float] = (1.0, 10.0)
) -> int:
    """Index of the candidate with the highest average annotator score.

    Ties go to the lowest candidate index.  Averages use exact float
    summation, so the result is invariant under annotator reordering.
    """
    if not scores or not scores[0]:
        raise ValueError("need at least one annotator and one candidate")
    width = len(scores[0])
    low, high = scale
    for row in scores:
        if len(row) != width:
            raise ValueError("score matrix rows must have equal length")
        for value in row:
            if not low <= value <= high:
                raise ValueError(f"score {value} outside scale [{low}, {high}]")
    averages = [math.fsum(row[j] for row in scores) / len(scores) for j in range(width)]
    best = max(averages)
    return averages.index(best)


def load_candidate_pool(text: str) -> list[tuple[str, str, str]]:
    """Parse a candidate-pool document: tab-separated id, caption, source tag."""
    pool = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"line {line_no}: expected 'id<TAB>caption[<TAB>source]'")
        pool.append((parts[0], parts[1], parts[2] if len(parts) > 2 else ""))
    return pool
