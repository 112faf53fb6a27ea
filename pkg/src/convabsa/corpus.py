"""Corpus parsing, serialization, statistics, and splitting.

The on-disk format is one self-contained JSON record per line (UTF-8).
An optional first line ``{"corpus_metadata": {...}}`` carries corpus-level
metadata such as provenance tags.  Span offsets are whitespace-token
indices, end-exclusive.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Mapping

from .dialogue import (
    AnnotatedDialogue,
    Attachment,
    Dialogue,
    Element,
    FlipRecord,
    Manner,
    Modality,
    Sentiment,
    Sextuple,
    Span,
    TriggerType,
    Utterance,
    ValidationReport,
    validate_annotations,
)

_RECORD_KEYS = ("doc_id", "language", "domain", "utterances", "sextuples", "flips")
_ELEMENT_KEYS = ("holder", "target", "aspect", "opinion", "rationale")


@dataclass(frozen=True)
class Corpus:
    dialogues: tuple[AnnotatedDialogue, ...] = ()
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.dialogues)


@dataclass(frozen=True)
class CorpusStats:
    dialogue_count: int = 0
    utterance_count: int = 0
    speaker_count: int = 0
    sextuple_count: int = 0
    flip_count: int = 0
    modality_counts: Mapping[str, int] = field(
        default_factory=lambda: {"image": 0, "audio": 0, "video": 0}
    )
    manner_counts: Mapping[str, int] = field(
        default_factory=lambda: {"explicit": 0, "implicit": 0}
    )

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(
            self.dialogue_count + other.dialogue_count,
            self.utterance_count + other.utterance_count,
            self.speaker_count + other.speaker_count,
            self.sextuple_count + other.sextuple_count,
            self.flip_count + other.flip_count,
            {k: self.modality_counts[k] + other.modality_counts[k] for k in self.modality_counts},
            {k: self.manner_counts[k] + other.manner_counts[k] for k in self.manner_counts},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "dialogue_count": self.dialogue_count,
            "utterance_count": self.utterance_count,
            "speaker_count": self.speaker_count,
            "sextuple_count": self.sextuple_count,
            "flip_count": self.flip_count,
            "modality_counts": dict(self.modality_counts),
            "manner_counts": dict(self.manner_counts),
        }


class _RecordError(ValueError):
    """Internal: a record field failed validation; message is the finding."""

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


def _expect(obj: Mapping[str, Any], key: str, kinds, rule: str, where: str = "record"):
    if key not in obj:
        raise _RecordError(rule, f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise _RecordError(rule, f"{where}: field {key!r} has wrong type")
    return value


def _parse_span(obj: Any, where: str) -> Span:
    if not isinstance(obj, dict):
        raise _RecordError("bad-span", f"{where}: span must be an object")
    utt = _expect(obj, "utt", int, "bad-span", where)
    start = _expect(obj, "start", int, "bad-span", where)
    end = _expect(obj, "end", int, "bad-span", where)
    if utt < 0 or start < 0 or end <= start:
        raise _RecordError("span-range", f"{where}: span [{start}, {end}) at utterance {utt} invalid")
    return Span(utt, start, end)


def _parse_element(obj: Any, where: str) -> Element:
    if not isinstance(obj, dict):
        raise _RecordError("bad-element", f"{where}: element must be an object")
    value = _expect(obj, "value", str, "bad-element", where)
    try:
        manner = Manner.parse(_expect(obj, "manner", str, "bad-element", where))
    except ValueError as e:
        raise _RecordError("bad-label", f"{where}: {e}") from e
    span = None
    if obj.get("span") is not None:
        span = _parse_span(obj["span"], where)
    return Element(value, manner, span)


def _parse_attachment(obj: Any, where: str) -> Attachment:
    if not isinstance(obj, dict):
        raise _RecordError("bad-attachment", f"{where}: attachment must be an object")
    try:
        kind = Modality.parse(_expect(obj, "type", str, "bad-attachment", where))
    except ValueError as e:
        raise _RecordError("bad-label", f"{where}: {e}") from e
    caption = _expect(obj, "caption", str, "bad-attachment", where)
    att_id = _expect(obj, "id", str, "bad-attachment", where)
    uri = obj.get("uri")
    if uri is not None and not isinstance(uri, str):
        raise _RecordError("bad-attachment", f"{where}: field 'uri' has wrong type")
    return Attachment(kind, caption, att_id, uri)


def _parse_utterance(obj: Any, where: str) -> Utterance:
    if not isinstance(obj, dict):
        raise _RecordError("bad-utterance", f"{where}: utterance must be an object")
    index = _expect(obj, "index", int, "bad-utterance", where)
    speaker_id = _expect(obj, "speaker_id", int, "bad-utterance", where)
    speaker_name = _expect(obj, "speaker_name", str, "bad-utterance", where)
    text = _expect(obj, "text", str, "bad-utterance", where)
    reply = _expect(obj, "reply", int, "bad-utterance", where)
    attachments: list[Attachment] = []
    modality = obj.get("modality")
    if modality is not None:
        if not isinstance(modality, list):
            raise _RecordError("bad-utterance", f"{where}: 'modality' must be null or a list")
        for k, att in enumerate(modality):
            attachments.append(_parse_attachment(att, f"{where} attachment {k}"))
    return Utterance(index, speaker_id, speaker_name, text, reply, tuple(attachments))


def _parse_sextuple(obj: Any, where: str) -> Sextuple:
    if not isinstance(obj, dict):
        raise _RecordError("bad-sextuple", f"{where}: sextuple must be an object")
    elements = {}
    for key in _ELEMENT_KEYS:
        raw = _expect(obj, key, dict, "bad-sextuple", where)
        elements[key] = _parse_element(raw, f"{where} {key}")
    try:
        sentiment = Sentiment.parse(_expect(obj, "sentiment", str, "bad-sextuple", where))
    except ValueError as e:
        raise _RecordError("bad-label", f"{where}: {e}") from e
    return Sextuple(
        elements["holder"],
        elements["target"],
        elements["aspect"],
        elements["opinion"],
        sentiment,
        elements["rationale"],
    )


def _parse_flip(obj: Any, where: str) -> FlipRecord:
    if not isinstance(obj, dict):
        raise _RecordError("bad-flip", f"{where}: flip must be an object")
    holder = _expect(obj, "holder", str, "bad-flip", where)
    target = _expect(obj, "target", str, "bad-flip", where)
    aspect = _expect(obj, "aspect", str, "bad-flip", where)
    try:
        initial = Sentiment.parse(_expect(obj, "initial", str, "bad-flip", where))
        flipped = Sentiment.parse(_expect(obj, "flipped", str, "bad-flip", where))
        trigger = TriggerType.parse(_expect(obj, "trigger", str, "bad-flip", where))
    except ValueError as e:
        raise _RecordError("bad-label", f"{where}: {e}") from e
    return FlipRecord(holder, target, aspect, initial, flipped, trigger)


def record_from_dict(obj: Any, report: ValidationReport, line: int | None = None) -> AnnotatedDialogue | None:
    """Build one AnnotatedDialogue from a decoded record, or reject it.

    Any rule violation (including annotation invariants) rejects the
    record with error findings; warnings keep the record.
    """
    if not isinstance(obj, dict):
        report.add("bad-record", "record must be a JSON object", line=line)
        return None
    try:
        doc_id = _expect(obj, "doc_id", str, "bad-record")
        language = _expect(obj, "language", str, "bad-record")
        domain = obj.get("domain")
        if domain is not None and not isinstance(domain, str):
            raise _RecordError("bad-record", "field 'domain' has wrong type")
        raw_utts = _expect(obj, "utterances", list, "bad-record")
        utterances = tuple(_parse_utterance(u, f"utterance {k}") for k, u in enumerate(raw_utts))
        raw_sx = obj.get("sextuples", [])
        if not isinstance(raw_sx, list):
            raise _RecordError("bad-record", "field 'sextuples' must be a list")
        sextuples = tuple(_parse_sextuple(s, f"sextuple {k}") for k, s in enumerate(raw_sx))
        raw_flips = obj.get("flips", [])
        if not isinstance(raw_flips, list):
            raise _RecordError("bad-record", "field 'flips' must be a list")
        flips = tuple(_parse_flip(f, f"flip {k}") for k, f in enumerate(raw_flips))
    except _RecordError as e:
        report.add(e.rule, str(e), line=line)
        return None
    extra = {k: v for k, v in obj.items() if k not in _RECORD_KEYS}
    ad = AnnotatedDialogue(
        Dialogue(doc_id, language, utterances, domain), sextuples, flips, extra
    )
    record_report = validate_annotations(ad)
    report.merge(record_report, line=line)
    if not record_report.ok:
        return None
    return ad


def _element_to_dict(el: Element) -> dict[str, Any]:
    out: dict[str, Any] = {"value": el.value, "manner": el.manner.value}
    if el.span is not None:
        out["span"] = {
            "utt": el.span.utterance_index,
            "start": el.span.start_token,
            "end": el.span.end_token,
        }
    return out


def record_to_dict(ad: AnnotatedDialogue) -> dict[str, Any]:
    d = ad.dialogue
    record: dict[str, Any] = {"doc_id": d.doc_id, "language": d.language}
    if d.domain is not None:
        record["domain"] = d.domain
    utterances = []
    for utt in d.utterances:
        u: dict[str, Any] = {
            "index": utt.index,
            "speaker_id": utt.speaker_id,
            "speaker_name": utt.speaker_name,
            "text": utt.text,
            "reply": utt.reply_to,
        }
        if utt.attachments:
            u["modality"] = [
                {"type": a.kind.wire_code, "caption": a.caption, "id": a.id}
                | ({"uri": a.uri} if a.uri is not None else {})
                for a in utt.attachments
            ]
        else:
            u["modality"] = None
        utterances.append(u)
    record["utterances"] = utterances
    record["sextuples"] = [
        {
            "holder": _element_to_dict(s.holder),
            "target": _element_to_dict(s.target),
            "aspect": _element_to_dict(s.aspect),
            "opinion": _element_to_dict(s.opinion),
            "sentiment": s.sentiment.value,
            "rationale": _element_to_dict(s.rationale),
        }
        for s in ad.sextuples
    ]
    record["flips"] = [
        {
            "holder": f.holder,
            "target": f.target,
            "aspect": f.aspect,
            "initial": f.initial.value,
            "flipped": f.flipped.value,
            "trigger": f.trigger.value,
        }
        for f in ad.flips
    ]
    for key in sorted(ad.extra):
        record[key] = ad.extra[key]
    return record


def parse_corpus(stream: bytes | str | IO) -> tuple[Corpus, ValidationReport]:
    """Parse a record-per-line corpus document.

    Well-formed records become dialogues; malformed ones are rejected
    with line-numbered findings.  Empty input yields an empty corpus
    plus a warning.
    """
    if isinstance(stream, bytes):
        text = stream.decode("utf-8")
    elif isinstance(stream, str):
        text = stream
    else:
        raw = stream.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    report = ValidationReport()
    dialogues: list[AnnotatedDialogue] = []
    metadata: dict[str, str] = {}
    seen_ids: set[str] = set()
    saw_record = False
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            report.add("bad-json", f"invalid JSON: {e.msg}", line=line_no)
            continue
        if isinstance(obj, dict) and "corpus_metadata" in obj:
            if saw_record or metadata:
                report.add(
                    "metadata-line",
                    "corpus_metadata must appear once, before all records",
                    line=line_no,
                )
                continue
            meta = obj["corpus_metadata"]
            if not isinstance(meta, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
            ):
                report.add("metadata-line", "corpus_metadata must map strings to strings", line=line_no)
                continue
            metadata = dict(meta)
            continue
        saw_record = True
        ad = record_from_dict(obj, report, line=line_no)
        if ad is None:
            continue
        if ad.dialogue.doc_id in seen_ids:
            report.add(
                "duplicate-doc-id",
                f"doc_id {ad.dialogue.doc_id!r} already used by an earlier record",
                line=line_no,
            )
            continue
        seen_ids.add(ad.dialogue.doc_id)
        dialogues.append(ad)
    if not dialogues and not report.findings and not metadata:
        report.add("empty-corpus", "input contains no records", severity="warning")
    return Corpus(tuple(dialogues), metadata), report


def serialize_corpus(corpus: Corpus) -> bytes:
    """Serialize a corpus; inverse of :func:`parse_corpus` on valid input."""
    lines = []
    if corpus.metadata:
        lines.append(
            json.dumps(
                {"corpus_metadata": {k: corpus.metadata[k] for k in sorted(corpus.metadata)}},
                ensure_ascii=False,
            )
        )
    for ad in corpus.dialogues:
        lines.append(json.dumps(record_to_dict(ad), ensure_ascii=False))
    if not lines:
        return b""
    return ("\n".join(lines) + "\n").encode("utf-8")


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Corpus-level counts; speakers are distinct (doc_id, speaker_id) pairs."""
    utterances = 0
    speakers: set[tuple[str, int]] = set()
    sextuples = 0
    flips = 0
    modality = {"image": 0, "audio": 0, "video": 0}
    manner = {"explicit": 0, "implicit": 0}
    for ad in corpus.dialogues:
        d = ad.dialogue
        utterances += len(d.utterances)
        for utt in d.utterances:
            speakers.add((d.doc_id, utt.speaker_id))
            for att in utt.attachments:
                modality[att.kind.value] += 1
        sextuples += len(ad.sextuples)
        flips += len(ad.flips)
        for sx in ad.sextuples:
            for _, el in sx.elements():
                manner[el.manner.value] += 1
    return CorpusStats(
        len(corpus.dialogues), utterances, len(speakers), sextuples, flips, modality, manner
    )


def _largest_remainder(n: int, ratios: tuple[float, float, float]) -> list[int]:
    quotas = [r * n for r in ratios]
    counts = [int(q) for q in quotas]
    remainders = [q - c for q, c in zip(quotas, counts)]
    # Seats left over go to the largest remainders; ties favor earlier buckets.
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    for i in range(n - sum(counts)):
        counts[order[i % 3]] += 1
    return counts


def split_corpus(
    corpus: Corpus, ratios: tuple[float, float, float], seed: int
) -> tuple[Corpus, Corpus, Corpus]:
    """Deterministic stratified train/dev/test split.

    Dialogues are partitioned per language, shuffled by ``seed``, and
    allocated by largest-remainder rounding of the ratios.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be three positive proportions; got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1; got {sum(ratios)}")
    if len(corpus.dialogues) < 3:
        raise ValueError(
            f"cannot split {len(corpus.dialogues)} dialogues three ways with nonzero ratios"
        )
    by_language: dict[str, list[int]] = {}
    for i, ad in enumerate(corpus.dialogues):
        by_language.setdefault(ad.dialogue.language, []).append(i)
    rng = random.Random(seed)
    buckets: tuple[list[int], list[int], list[int]] = ([], [], [])
    for language in sorted(by_language):
        indices = list(by_language[language])
        rng.shuffle(indices)
        counts = _largest_remainder(len(indices), tuple(ratios))
        offset = 0
        for b, count in enumerate(counts):
            buckets[b].extend(indices[offset : offset + count])
            offset += count
    parts = []
    for chosen in buckets:
        ordered = tuple(corpus.dialogues[i] for i in sorted(chosen))
        parts.append(Corpus(ordered, dict(corpus.metadata)))
    return parts[0], parts[1], parts[2]


def corpus_from_dialogues(
    dialogues: Iterable[AnnotatedDialogue], metadata: Mapping[str, str] | None = None
) -> Corpus:
    return Corpus(tuple(dialogues), dict(metadata or {}))
