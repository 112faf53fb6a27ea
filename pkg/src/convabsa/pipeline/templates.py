"""Prompt templates for the four-step reasoning chain and its verification.

Steps run in fixed order: target-aspect pairs, holder-opinion quadruples,
sentiment-rationale sextuples, then flip-trigger records.  Each step's
structured output can be paraphrased into a natural-language claim and
checked against the dialogue before the next step proceeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from string import Template

from ..dialogue import Dialogue

STEP_IDS = (1, 2, 3, 4)

_STEP_INSTRUCTIONS = {
    1: (
        "Based on the multi-party dialogue and its accompanying multimodal data, "
        "please identify all possible targets and their specific aspects mentioned "
        "in the dialogue. Extract each target and aspect explicitly from the "
        "utterance text spans, or infer them implicitly via your understanding of "
        "the input data. Ensure each identified target is paired with its "
        "aspect(s), forming target-aspect pairs."
    ),
    2: (
        "Based on the dialogue and each target-aspect pair identified previously, "
        "please identify the holder (the person who expresses an opinion, normally "
        "should be a speaker of certain dialogue utterance) and the opinion, both "
        "either directly extracted from the text or inferred from our understanding "
        "of the input data. Formulate your output into 'holder-target-aspect-opinion' "
        "quadruples, ensuring each element is clearly identified."
    ),
    3: (
        "Based on the dialogue and each holder-target-aspect-opinion quadruple "
        "identified previously, please identify the sentiment polarity associated "
        "with the opinion and analyze the causal rationale behind it. The sentiment "
        "polarity should be classified as 'positive', 'neutral', or 'negative'. The "
        "rationale should be extracted explicitly from the text, or inferred "
        "implicitly via your understanding of the input data. Formulate your output "
        "into 'holder-target-aspect-opinion-sentiment-rationale' sextuples, ensuring "
        "sentiment polarity is clearly analyzed and the other five elements are "
        "clearly identified."
    ),
    4: (
        "Based on the dialogue and each holder-target-aspect-opinion-sentiment-rationale "
        "sextuple, please identify instances where a sentiment flip occurs for the same "
        "holder regarding the specific target-aspect pair. Determine the trigger type "
        "for these flips from the predefined categories: introduction of new "
        "information, logical argumentation, participant feedback and interaction, "
        "personal experience and self-reflection. Formulate your output to include the "
        "holder, target, aspect, initial sentiment, flipped sentiment, and the trigger "
        'type, or state "None" if no flips are identified.'
    ),
}

_EXPECTED_OUTPUTS = {
    1: "(target, aspect), (target, aspect), ...",
    2: "(holder, target, aspect, opinion), (holder, target, aspect, opinion), ...",
    3: "(holder, target, aspect, opinion, sentiment, rationale), ...",
    4: '(holder, target, aspect, initial sentiment, flipped sentiment, trigger type), ...; or "None"',
}

_PRIOR_LABELS = {
    2: "Target-aspect pairs:",
    3: "Holder-target-aspect-opinion quadruples:",
    4: "Holder-target-aspect-opinion-sentiment-rationale sextuples:",
}

_VERIFY_INSTRUCTION = (
    "Please based on the dialogue, verify whether these descriptions are consistent "
    "with the dialogue content and provide '1' for 'yes' or '0' for 'no' judgment."
)
_VERIFY_INSTRUCTION_COMMONSENSE = (
    "Please based on the dialogue and your commonsense knowledge, verify whether "
    "these descriptions accurately capture the emotional dynamics and their triggers "
    "in the dialogue and provide '1' for 'yes' or '0' for 'no' judgment."
)

_CLAIM_OPENERS = {
    1: (
        "In this dialogue, participants discussed various targets and their "
        "corresponding aspects, including "
    ),
    2: (
        "In this dialogue, different participants expressed their opinions towards "
        "various aspects of targets, including "
    ),
    3: (
        "In this dialogue, the analysis has identified sentiments and rationales "
        "behind opinions, including "
    ),
    4: (
        "In this dialogue, instances of sentiment flipping and their triggers have "
        "been identified, including "
    ),
}

_CLAIM_CLAUSES = {
    1: Template("$aspect of $target"),
    2: Template("the opinion of $holder on $aspect of $target is $opinion"),
    3: Template(
        "$holder's opinion $opinion on $aspect of $target carries a sentiment "
        "$sentiment with rationale $rationale"
    ),
    4: Template(
        "$holder's sentiment towards $aspect of $target initially was $initial and "
        "later flipped to $flipped due to trigger $trigger"
    ),
}

_CLAIM_JOINERS = {1: ", ", 2: ", and ", 3: ", and ", 4: ", and "}


@dataclass(frozen=True)
class PromptTemplate:
    """A named template whose rendering must bind every placeholder."""

    step_id: str
    text: str

    def placeholders(self) -> frozenset[str]:
        return frozenset(
            m.group("named") or m.group("braced")
            for m in Template(self.text).pattern.finditer(self.text)
            if m.group("named") or m.group("braced")
        )

    def render(self, **values: str) -> str:
        try:
            return Template(self.text).substitute(**values)
        except KeyError as e:
            raise ValueError(f"template {self.step_id}: unbound placeholder {e.args[0]!r}") from e


def _step_template(step: int) -> PromptTemplate:
    parts = ["Input Data:", "$dialogue"]
    if step in _PRIOR_LABELS:
        parts += ["", _PRIOR_LABELS[step] + " $tuples"]
    parts += ["", "Instruction: " + _STEP_INSTRUCTIONS[step]]
    parts += ["", "Expected Output: " + _EXPECTED_OUTPUTS[step]]
    return PromptTemplate(f"P{step}", "\n".join(parts))


TEMPLATES: dict[str, PromptTemplate] = {f"P{k}": _step_template(k) for k in STEP_IDS}
TEMPLATES["V1"] = PromptTemplate("V1", "$dialogue\n\n$claim\n\n" + _VERIFY_INSTRUCTION)
TEMPLATES["V2"] = PromptTemplate("V2", "$dialogue\n\n$claim\n\n" + _VERIFY_INSTRUCTION)
TEMPLATES["V3"] = PromptTemplate("V3", "$dialogue\n\n$claim\n\n" + _VERIFY_INSTRUCTION)
TEMPLATES["V4"] = PromptTemplate(
    "V4", "$dialogue\n\n$claim\n\n" + _VERIFY_INSTRUCTION_COMMONSENSE
)
TEMPLATES["JUDGE"] = PromptTemplate(
    "JUDGE",
    "$dialogue\n\nGiven the context of the dialogue, do '$prediction' and '$gold' "
    "have similar meanings? Answer '1' for yes or '0' for no.",
)

_MEDIA_TAGS = {"image": "IMAGE", "audio": "AUDIO", "video": "VIDEO"}


def render_dialogue(dialogue: Dialogue) -> str:
    """Numbered transcript with reply markers and attachment caption lines.

    Lines are 1-based; reply values keep the raw 0-based utterance index
    (-1 for the root).  Attachments follow their utterance as
    ``[KIND_k](caption: ...)`` lines with per-kind counters.
    """
    lines = []
    counters = {kind: 0 for kind in _MEDIA_TAGS}
    for utt in dialogue.utterances:
        lines.append(f"{utt.index + 1}. {utt.speaker_name}: {utt.text} (reply = {utt.reply_to})")
        for att in utt.attachments:
            counters[att.kind.value] += 1
            tag = _MEDIA_TAGS[att.kind.value]
            lines.append(f"[{tag}_{counters[att.kind.value]}](caption: {att.caption})")
    return "\n".join(lines)


def build_step_prompt(step: int, dialogue_text: str, prior_tuples: str | None = None) -> str:
    if step not in STEP_IDS:
        raise ValueError(f"unknown step: {step}")
    if step == 1:
        return TEMPLATES["P1"].render(dialogue=dialogue_text)
    if prior_tuples is None:
        raise ValueError(f"step {step} requires the previous step's tuples")
    return TEMPLATES[f"P{step}"].render(dialogue=dialogue_text, tuples=prior_tuples)


def paraphrase_tuples(step: int, tuples: list[tuple[str, ...]]) -> str:
    """Natural-language claim equivalent to a step's structured output."""
    if step not in STEP_IDS:
        raise ValueError(f"unknown step: {step}")
    if not tuples:
        raise ValueError("cannot paraphrase an empty tuple list")
    clauses = []
    for fields in tuples:
        if step == 1:
            values = {"target": fields[0], "aspect": fields[1]}
        elif step == 2:
            values = {
                "holder": fields[0],
                "target": fields[1],
                "aspect": fields[2],
                "opinion": fields[3],
            }
        elif step == 3:
            values = {
                "holder": fields[0],
                "target": fields[1],
                "aspect": fields[2],
                "opinion": fields[3],
                "sentiment": fields[4],
                "rationale": fields[5],
            }
        else:
            values = {
                "holder": fields[0],
                "target": fields[1],
                "aspect": fields[2],
                "initial": fields[3],
                "flipped": fields[4],
                "trigger": fields[5],
            }
        clauses.append(_CLAIM_CLAUSES[step].substitute(**values))
    return _CLAIM_OPENERS[step] + _CLAIM_JOINERS[step].join(clauses) + "."


def build_verify_prompt(step: int, claim: str, dialogue_text: str) -> str:
    return TEMPLATES[f"V{step}"].render(dialogue=dialogue_text, claim=claim)


def build_judge_prompt(dialogue_text: str, prediction: str, gold: str) -> str:
    return TEMPLATES["JUDGE"].render(dialogue=dialogue_text, prediction=prediction, gold=gold)
