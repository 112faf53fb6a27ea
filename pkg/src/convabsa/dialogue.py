"""Domain types for annotated multi-party dialogues.

A dialogue is an ordered list of utterances forming a reply forest
(every utterance replies to an earlier one or to the root).  Annotations
attach sentiment sextuples and sentiment-flip records to a dialogue.

All types are immutable value objects.  Constructors are permissive;
structural rules are checked by :func:`validate_structure` and
:func:`validate_annotations`, which report findings instead of raising,
so that invalid inputs can be surfaced to users rather than crashing
parsers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Mapping

from .textnorm import normalize_term, tokenize

LANGUAGES = ("en", "zh", "es")


class Sentiment(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"

    @classmethod
    def parse(cls, label: str) -> "Sentiment":
        key = " ".join(str(label).split()).casefold()
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown sentiment label: {label!r}")


class TriggerType(str, Enum):
    NEW_INFORMATION = "introduction_of_new_information"
    LOGICAL_ARGUMENTATION = "logical_argumentation"
    PARTICIPANT_FEEDBACK = "participant_feedback_and_interaction"
    PERSONAL_EXPERIENCE = "personal_experience_and_self_reflection"

    @property
    def label(self) -> str:
        """Human-readable category name used in prompts and reports."""
        return _TRIGGER_LABELS[self]

    @classmethod
    def parse(cls, label: str) -> "TriggerType":
        key = " ".join(str(label).replace("_", " ").replace("-", " ").split())
        key = key.casefold().replace(" ", "_")
        key = _TRIGGER_ALIASES.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown trigger label: {label!r}")


_TRIGGER_LABELS = {
    TriggerType.NEW_INFORMATION: "Introduction of New Information",
    TriggerType.LOGICAL_ARGUMENTATION: "Logical Argumentation",
    TriggerType.PARTICIPANT_FEEDBACK: "Participant Feedback and Interaction",
    TriggerType.PERSONAL_EXPERIENCE: "Personal Experience and Self-reflection",
}

# Tolerated surface variants seen in category listings (plural phrasing).
_TRIGGER_ALIASES = {
    "personal_experiences_and_self_reflection": TriggerType.PERSONAL_EXPERIENCE.value,
}


class Manner(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"

    @classmethod
    def parse(cls, label: str) -> "Manner":
        key = str(label).strip().casefold()
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown manner label: {label!r}")


class Modality(str, Enum):
    IMAGE = "image"
    AUDIO = "audio"
    VIDEO = "video"

    @property
    def wire_code(self) -> str:
        return _MODALITY_CODES[self]

    @classmethod
    def parse(cls, label: str) -> "Modality":
        key = str(label).strip().casefold()
        for member in cls:
            if member.value == key or member.wire_code == key:
                return member
        raise ValueError(f"unknown modality kind: {label!r}")


_MODALITY_CODES = {
    Modality.IMAGE: "img",
    Modality.AUDIO: "aud",
    Modality.VIDEO: "vid",
}


@dataclass(frozen=True)
class Span:
    """Token range ``[start_token, end_token)`` inside one utterance."""

    utterance_index: int
    start_token: int
    end_token: int


@dataclass(frozen=True)
class Attachment:
    kind: Modality
    caption: str
    id: str
    uri: str | None = None


@dataclass(frozen=True)
class Utterance:
    index: int
    speaker_id: int
    speaker_name: str
    text: str
    reply_to: int = -1
    attachments: tuple[Attachment, ...] = ()


@dataclass(frozen=True)
class Dialogue:
    doc_id: str
    language: str
    utterances: tuple[Utterance, ...]
    domain: str | None = None


@dataclass(frozen=True)
class Element:
    """One sextuple slot: its surface value, manner, and optional span.

    Explicit elements are realized as a contiguous token span of one
    utterance; implicit elements are inferred from context or non-text
    attachments and carry no span.
    """

    value: str
    manner: Manner
    span: Span | None = None


@dataclass(frozen=True)
class Sextuple:
    holder: Element
    target: Element
    aspect: Element
    opinion: Element
    sentiment: Sentiment
    rationale: Element

    def elements(self) -> Iterator[tuple[str, Element]]:
        yield "holder", self.holder
        yield "target", self.target
        yield "aspect", self.aspect
        yield "opinion", self.opinion
        yield "rationale", self.rationale


@dataclass(frozen=True)
class FlipRecord:
    holder: str
    target: str
    aspect: str
    initial: Sentiment
    flipped: Sentiment
    trigger: TriggerType


@dataclass(frozen=True)
class AnnotatedDialogue:
    dialogue: Dialogue
    sextuples: tuple[Sextuple, ...] = ()
    flips: tuple[FlipRecord, ...] = ()
    # Unknown record-level fields, preserved opaquely on round-trip.
    extra: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Finding:
    rule: str
    message: str
    severity: str = "error"
    utterance: int | None = None
    line: int | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "rule": self.rule,
            "message": self.message,
            "severity": self.severity,
        }
        if self.utterance is not None:
            out["utterance"] = self.utterance
        if self.line is not None:
            out["line"] = self.line
        return out

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where += f"line {self.line} "
        if self.utterance is not None:
            where += f"utterance {self.utterance} "
        return f"{where}[{self.rule}] {self.severity}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def add(
        self,
        rule: str,
        message: str,
        *,
        severity: str = "error",
        utterance: int | None = None,
        line: int | None = None,
    ) -> None:
        self.findings.append(Finding(rule, message, severity, utterance, line))

    def merge(self, other: "ValidationReport", line: int | None = None) -> None:
        """Absorb ``other``'s findings, stamping a line number if given."""
        for f in other.findings:
            if line is not None and f.line is None:
                f = Finding(f.rule, f.message, f.severity, f.utterance, line)
            self.findings.append(f)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dicts(self) -> list[dict[str, Any]]:
        return [f.to_dict() for f in self.findings]


class SpanError(ValueError):
    """A span does not denote a valid token range of its dialogue."""


def span_text(dialogue: Dialogue, span: Span) -> str:
    """Text of the token slice a span points at, joined by single spaces."""
    if not 0 <= span.utterance_index < len(dialogue.utterances):
        raise SpanError(
            f"utterance index {span.utterance_index} out of range "
            f"(dialogue has {len(dialogue.utterances)} utterances)"
        )
    tokens = tokenize(dialogue.utterances[span.utterance_index].text)
    if not (0 <= span.start_token < span.end_token <= len(tokens)):
        raise SpanError(
            f"token range [{span.start_token}, {span.end_token}) invalid for "
            f"utterance {span.utterance_index} with {len(tokens)} tokens"
        )
    return " ".join(tokens[span.start_token : span.end_token])


def span_in_range(dialogue: Dialogue, span: Span) -> bool:
    if not 0 <= span.utterance_index < len(dialogue.utterances):
        return False
    tokens = tokenize(dialogue.utterances[span.utterance_index].text)
    return 0 <= span.start_token < span.end_token <= len(tokens)


def validate_structure(dialogue: Dialogue) -> ValidationReport:
    """Check dialogue and utterance structural rules.

    Zero findings iff the reply forest, index ordering, and non-empty
    text/caption rules all hold.  Problems are findings, not exceptions.
    """
    report = ValidationReport()
    if not dialogue.doc_id:
        report.add("doc-id", "doc_id must be non-empty")
    if dialogue.language not in LANGUAGES:
        report.add(
            "language",
            f"language must be one of {', '.join(LANGUAGES)}; got {dialogue.language!r}",
        )
    if not dialogue.utterances:
        report.add("empty-dialogue", "dialogue must contain at least one utterance")
        return report
    for position, utt in enumerate(dialogue.utterances):
        if utt.index != position:
            report.add(
                "utterance-index",
                f"utterance indices must be 0..n-1 in order; expected {position}, got {utt.index}",
                utterance=position,
            )
        if not utt.text.strip():
            report.add("empty-text", "utterance text must be non-empty", utterance=position)
        if utt.reply_to != -1 and not 0 <= utt.reply_to < position:
            report.add("reply-order", "reply_to must precede utterance", utterance=position)
        for att in utt.attachments:
            if not att.caption.strip():
                report.add(
                    "empty-caption",
                    f"attachment {att.id!r} caption must be non-empty",
                    utterance=position,
                )
    return report


def validate_annotations(ad: AnnotatedDialogue) -> ValidationReport:
    """Structure checks plus annotation-level rules for one record."""
    report = validate_structure(ad.dialogue)
    speakers = {normalize_term(u.speaker_name) for u in ad.dialogue.utterances}
    for i, sx in enumerate(ad.sextuples):
        for category, el in sx.elements():
            where = f"sextuple {i} {category}"
            if el.manner is Manner.EXPLICIT:
                if el.span is None:
                    report.add("manner-span", f"{where}: explicit element requires a span")
                elif not span_in_range(ad.dialogue, el.span):
                    report.add("span-range", f"{where}: span out of range")
                elif normalize_term(span_text(ad.dialogue, el.span)) != normalize_term(el.value):
                    report.add(
                        "span-mismatch",
                        f"{where}: span text does not match element value {el.value!r}",
                    )
            else:
                if el.span is not None:
                    report.add("manner-span", f"{where}: implicit element must not carry a span")
        if normalize_term(sx.holder.value) not in speakers:
            report.add(
                "holder-not-speaker",
                f"sextuple {i}: holder {sx.holder.value!r} is not a dialogue speaker",
                severity="warning",
            )
    for i, flip in enumerate(ad.flips):
        if flip.initial == flip.flipped:
            report.add(
                "flip-same-sentiment",
                f"flip {i}: initial and flipped sentiment must differ",
            )
    return report


def cross_utterance_distance(dialogue: Dialogue, sextuple: Sextuple) -> int:
    """Largest utterance-index gap between the sextuple's explicit spans.

    Zero when fewer than two elements carry spans.
    """
    indices = [
        el.span.utterance_index
        for _, el in sextuple.elements()
        if el.manner is Manner.EXPLICIT and el.span is not None
    ]
    if len(indices) < 2:
        return 0
    return max(indices) - min(indices)


def context_text(dialogue: Dialogue) -> str:
    """Plain transcript used as context for semantic judgments."""
    lines = []
    for utt in dialogue.utterances:
        lines.append(f"{utt.speaker_name}: {utt.text}")
        for att in utt.attachments:
            lines.append(f"[{att.kind.value}: {att.caption}]")
    return "\n".join(lines)
