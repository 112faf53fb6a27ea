"""Shared fixtures and generators for the test suite.

The camera-review record mirrors the worked annotated instance used
throughout the tests; the phone-review dialogue mirrors the worked
reasoning session.  Random corpora are built so that every structural
and annotation invariant holds by construction.
"""

from __future__ import annotations

import json
import random

from convabsa.corpus import Corpus, parse_corpus, record_from_dict
from convabsa.dialogue import (
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
)
from convabsa.flips import derive_flips


def _el(value: str, span: tuple[int, int, int] | None = None) -> dict:
    out: dict = {"value": value, "manner": "explicit" if span else "implicit"}
    if span:
        out["span"] = {"utt": span[0], "start": span[1], "end": span[2]}
    return out


CAMERA_RECORD: dict = {
    "doc_id": "00024",
    "language": "en",
    "utterances": [
        {
            "index": 0,
            "speaker_id": 0,
            "speaker_name": "Ava",
            "text": (
                "I recently purchased a new digital camera, and its image quality is "
                "stunning, capturing every detail with such clarity and vibrant colors "
                "that photos almost look lifelike."
            ),
            "reply": -1,
            "modality": None,
        },
        {
            "index": 1,
            "speaker_id": 1,
            "speaker_name": "Liam",
            "text": (
                "That sounds amazing! What about its low-light performance? Does it "
                "capture sharp and clear images in low-light conditions?"
            ),
            "reply": 0,
            "modality": None,
        },
        {
            "index": 2,
            "speaker_id": 0,
            "speaker_name": "Ava",
            "text": (
                "The low-light performance is quite impressive. It captures sharp and "
                "clear images even in dimly lit environments."
            ),
            "reply": 1,
            "modality": None,
        },
        {
            "index": 3,
            "speaker_id": 2,
            "speaker_name": "Noah",
            "text": "What about its battery life?",
            "reply": 0,
            "modality": None,
        },
        {
            "index": 4,
            "speaker_id": 0,
            "speaker_name": "Ava",
            "text": (
                "The battery life is disappointing. It drains quickly and requires "
                "frequent recharging."
            ),
            "reply": 3,
            "modality": None,
        },
        {
            "index": 5,
            "speaker_id": 1,
            "speaker_name": "Liam",
            "text": (
                "It's worth noting that the camera's advanced features naturally demand "
                "more power, which is common for high-performance devices. Compared to "
                "similar models, our camera holds up well in terms of battery life, "
                "making it a fair trade-off for its quality."
            ),
            "reply": 4,
            "modality": None,
        },
        {
            "index": 6,
            "speaker_id": 0,
            "speaker_name": "Ava",
            "text": (
                "That's a good point. Considering the advanced features and comparing "
                "it with other cameras, the battery life does seem acceptable. I "
                "hadn't looked at it that way before."
            ),
            "reply": 5,
            "modality": None,
        },
    ],
    "sextuples": [
        {
            "holder": _el("Ava"),
            "target": _el("digital camera", (0, 5, 7)),
            "aspect": _el("image quality", (0, 9, 11)),
            "opinion": _el("stunning", (0, 12, 13)),
            "sentiment": "positive",
            "rationale": _el(
                "capturing every detail with such clarity and vibrant colors that "
                "photos almost look lifelike",
                (0, 13, 27),
            ),
        },
        {
            "holder": _el("Ava"),
            "target": _el("digital camera", (0, 5, 7)),
            "aspect": _el("low-light performance", (2, 1, 3)),
            "opinion": _el("quite impressive", (2, 4, 6)),
            "sentiment": "positive",
            "rationale": _el(
                "it captures sharp and clear images even in dimly lit environments",
                (2, 6, 17),
            ),
        },
        {
            "holder": _el("Ava"),
            "target": _el("digital camera", (0, 5, 7)),
            "aspect": _el("battery life", (4, 1, 3)),
            "opinion": _el("disappointing", (4, 4, 5)),
            "sentiment": "negative",
            "rationale": _el(
                "it drains quickly and requires frequent recharging", (4, 5, 12)
            ),
        },
        {
            "holder": _el("Liam"),
            "target": _el("digital camera", (0, 5, 7)),
            "aspect": _el("battery life", (5, 30, 32)),
            "opinion": _el("holds up well", (5, 24, 27)),
            "sentiment": "positive",
            "rationale": _el("compared to similar models", (5, 18, 22)),
        },
        {
            "holder": _el("Ava"),
            "target": _el("digital camera", (0, 5, 7)),
            "aspect": _el("battery life", (6, 15, 17)),
            "opinion": _el("acceptable", (6, 19, 20)),
            "sentiment": "neutral",
            "rationale": _el(
                "considering the advanced features and comparing it with other cameras",
                (6, 4, 14),
            ),
        },
    ],
    "flips": [
        {
            "holder": "Ava",
            "target": "digital camera",
            "aspect": "battery life",
            "initial": "negative",
            "flipped": "neutral",
            "trigger": "participant_feedback_and_interaction",
        }
    ],
}


def camera_record_jsonl() -> bytes:
    return (json.dumps(CAMERA_RECORD, ensure_ascii=False) + "\n").encode("utf-8")


def camera_annotated() -> AnnotatedDialogue:
    report = ValidationReport()
    ad = record_from_dict(json.loads(json.dumps(CAMERA_RECORD)), report)
    assert ad is not None and report.ok, [str(f) for f in report.findings]
    return ad


def phone_dialogue() -> Dialogue:
    """The phone-review dialogue used by the worked reasoning session."""
    texts = [
        (
            "Chris",
            0,
            -1,
            "I find the low-light performance is exceptional, capturing clear and "
            "vibrant photos even in dim settings.",
            [Attachment(Modality.IMAGE, "Dusk light in the forest through a mobile phone lens.", "img-1")],
        ),
        (
            "Emma",
            1,
            0,
            "But the battery life to be quite disappointing. It tends to drain "
            "quickly even with minimal usage.",
            [],
        ),
        (
            "Sophia",
            2,
            1,
            "Yes, it is a significant issue, often needing recharging multiple times a day.",
            [],
        ),
        ("Lucas", 3, 0, "And the phone's design blends elegance with practicality.", []),
        (
            "Chris",
            0,
            3,
            "However, I don't see it that way; it seems to follow the same formula "
            "as its predecessors.",
            [],
        ),
        (
            "Sophia",
            2,
            4,
            "Have you guys noticed the new model's edge-to-edge display design? It's "
            "useful and maximizes screen size without increasing the phone's overall "
            "dimensions.",
            [Attachment(Modality.VIDEO, "Showcasing the phone's special edge-to-edge display design.", "vid-1")],
        ),
        (
            "Chris",
            0,
            5,
            "That's a good point. I hadn't really considered that aspect. The "
            "edge-to-edge display design is impressive.",
            [],
        ),
    ]
    utterances = tuple(
        Utterance(i, sid, name, text, reply, tuple(atts))
        for i, (name, sid, reply, text, atts) in enumerate(texts)
    )
    return Dialogue("phone-session", "en", utterances, domain="Smartphones")


PHONE_STEP1 = [("phone", "low-light performance"), ("phone", "battery life"), ("phone", "design")]
PHONE_STEP2 = [
    ("Chris", "phone", "low-light performance", "exceptional"),
    ("Emma", "phone", "battery life", "quite disappointing"),
    ("Sophia", "phone", "battery life", "a significant issue"),
    ("Lucas", "phone", "design", "good"),
    ("Chris", "phone", "design", "ordinary"),
    ("Sophia", "phone", "design", "useful"),
    ("Chris", "phone", "design", "impressive"),
]
PHONE_STEP3 = [
    (
        "Chris", "phone", "low-light performance", "exceptional", "positive",
        "capturing clear and vibrant photos even in dim settings",
    ),
    (
        "Emma", "phone", "battery life", "quite disappointing", "negative",
        "drain quickly even with minimal usage",
    ),
    (
        "Sophia", "phone", "battery life", "a significant issue", "negative",
        "often needing recharging multiple times a day",
    ),
    ("Lucas", "phone", "design", "good", "positive", "blends elegance with practicality"),
    (
        "Chris", "phone", "design", "ordinary", "neutral",
        "follow the same formula as its predecessors",
    ),
    (
        "Sophia", "phone", "design", "useful", "positive",
        "maximizes screen size without increasing the phone's overall dimensions",
    ),
    (
        "Chris", "phone", "design", "impressive", "positive",
        "I hadn't really considered that aspect.",
    ),
]
PHONE_STEP4 = [("Chris", "phone", "design", "neutral", "positive", "Introduction of New Information")]


_FILLER = (
    "frame lens sensor casing hinge module finish texture grip coating layout "
    "profile shell strap menu handle switch panel cover mount"
).split()
_TARGETS = ["camera", "laptop", "tablet", "printer", "monitor", "router"]
_ASPECTS = ["battery", "screen", "keyboard", "casing", "firmware", "stand"]
_OPINIONS = ["sturdy", "sluggish", "balanced", "fragile", "responsive", "loud"]
_REASON_WORDS = (
    "charges survives drops boots renders syncs glows fades rattles grips "
    "holds cools warms spins scrolls clicks"
).split()
_NAMES = ["Ava", "Ben", "Cara", "Dev", "Eli", "Faye"]
_IMPLICIT_POOL = ["undertone", "subtext", "vibe", "innuendo", "intimation"]
_SENTIMENTS = [Sentiment.POSITIVE, Sentiment.NEGATIVE, Sentiment.NEUTRAL]


class _SexSpec:
    def __init__(self, rng: random.Random, idx: int, implicit_ok: bool = True):
        self.target = rng.choice(_TARGETS)
        self.aspect = rng.choice(_ASPECTS)
        self.opinion = rng.choice(_OPINIONS)
        words = rng.sample(_REASON_WORDS, 3)
        if rng.random() < 0.4:
            self.rationale = f"{words[0]} r{idx}, {words[1]} {words[2]}"
        else:
            self.rationale = f"{words[0]} r{idx} {words[1]}"
        self.implicit_opinion = implicit_ok and rng.random() < 0.25
        self.implicit_rationale = implicit_ok and rng.random() < 0.2
        if self.implicit_opinion:
            self.opinion = f"{rng.choice(_IMPLICIT_POOL)} o{idx}"
        if self.implicit_rationale:
            self.rationale = f"{rng.choice(_IMPLICIT_POOL)} reason {idx}"
        self.sentiment = rng.choice(_SENTIMENTS)


def _compose_utterance(rng: random.Random, spec: _SexSpec):
    tokens: list[str] = []
    spans: dict[str, tuple[int, int]] = {}

    def put(name: str, phrase: str):
        start = len(tokens)
        tokens.extend(phrase.split())
        spans[name] = (start, len(tokens))

    tokens.extend(rng.sample(_FILLER, rng.randint(1, 2)))
    put("target", spec.target)
    put("aspect", spec.aspect)
    tokens.append("is")
    if spec.implicit_opinion:
        tokens.append(rng.choice(_FILLER))
    else:
        put("opinion", spec.opinion)
    tokens.append("because")
    if spec.implicit_rationale:
        tokens.extend(rng.sample(_FILLER, 2))
    else:
        put("rationale", spec.rationale)
    return " ".join(tokens), spans


def make_random_dialogue(
    rng: random.Random,
    doc_id: str,
    language: str = "en",
    force_flip: bool = False,
    with_attachments: bool = True,
    implicit_ok: bool = True,
) -> AnnotatedDialogue:
    n_sextuples = rng.randint(1, 4)
    specs = [_SexSpec(rng, i, implicit_ok) for i in range(n_sextuples)]
    if force_flip or rng.random() < 0.4:
        twin = _SexSpec(rng, n_sextuples, implicit_ok=False)
        twin.target = specs[0].target
        twin.aspect = specs[0].aspect
        twin.implicit_opinion = False
        twin.sentiment = rng.choice([s for s in _SENTIMENTS if s is not specs[0].sentiment])
        specs.append(twin)
    speakers = rng.sample(_NAMES, rng.randint(2, 4))
    utterances: list[Utterance] = []
    sextuples: list[Sextuple] = []
    attachment_counter = 0
    for i, spec in enumerate(specs):
        text, spans = _compose_utterance(rng, spec)
        if spec is specs[-1] and len(specs) > n_sextuples:
            speaker = utterances[0].speaker_name
            speaker_id = utterances[0].speaker_id
        else:
            speaker = speakers[i % len(speakers)]
            speaker_id = speakers.index(speaker)
        attachments = []
        if with_attachments and rng.random() < 0.3:
            attachment_counter += 1
            kind = rng.choice(list(Modality))
            attachments.append(
                Attachment(
                    kind,
                    f"captured {rng.choice(_FILLER)} near the {rng.choice(_FILLER)}",
                    f"{doc_id}-att{attachment_counter}",
                    f"db://{doc_id}/{attachment_counter}" if rng.random() < 0.5 else None,
                )
            )
        reply = -1 if i == 0 else rng.randrange(i)
        utterances.append(
            Utterance(i, speaker_id, speaker, text, reply, tuple(attachments))
        )

        def span_of(name: str) -> Span | None:
            if name not in spans:
                return None
            start, end = spans[name]
            return Span(i, start, end)

        sextuples.append(
            Sextuple(
                Element(speaker, Manner.IMPLICIT),
                Element(spec.target, Manner.EXPLICIT, span_of("target")),
                Element(spec.aspect, Manner.EXPLICIT, span_of("aspect")),
                Element(
                    spec.opinion,
                    Manner.IMPLICIT if spec.implicit_opinion else Manner.EXPLICIT,
                    None if spec.implicit_opinion else span_of("opinion"),
                ),
                spec.sentiment,
                Element(
                    spec.rationale,
                    Manner.IMPLICIT if spec.implicit_rationale else Manner.EXPLICIT,
                    None if spec.implicit_rationale else span_of("rationale"),
                ),
            )
        )
    dialogue = Dialogue(doc_id, language, tuple(utterances))
    bare = AnnotatedDialogue(dialogue, tuple(sextuples))
    flips = tuple(
        FlipRecord(d.holder, d.target, d.aspect, d.initial, d.flipped, rng.choice(list(TriggerType)))
        for d in derive_flips(bare)
    )
    return AnnotatedDialogue(dialogue, tuple(sextuples), flips)


def make_random_corpus(
    seed: int,
    n_dialogues: int | None = None,
    languages: tuple[str, ...] = ("en",),
    with_metadata: bool = False,
    implicit_ok: bool = True,
) -> Corpus:
    rng = random.Random(seed)
    if n_dialogues is None:
        n_dialogues = rng.randint(1, 4)
    dialogues = []
    for i in range(n_dialogues):
        dialogues.append(
            make_random_dialogue(
                rng,
                f"doc-{seed}-{i:03d}",
                language=languages[i % len(languages)],
                force_flip=(i == 0),
                implicit_ok=implicit_ok,
            )
        )
    metadata = {"provenance": "synthetic", "seed": str(seed)} if with_metadata else {}
    return Corpus(tuple(dialogues), metadata)


def pipeline_fixture_corpus(n_dialogues: int = 20, seed: int = 7) -> Corpus:
    """English corpus sized for end-to-end replay runs."""
    rng = random.Random(seed)
    dialogues = [
        make_random_dialogue(rng, f"pipe-{i:03d}", force_flip=(i % 3 == 0))
        for i in range(n_dialogues)
    ]
    return Corpus(tuple(dialogues), {"provenance": "synthetic"})


def assert_corpus_valid(corpus: Corpus) -> None:
    from convabsa.corpus import serialize_corpus

    _, report = parse_corpus(serialize_corpus(corpus))
    assert report.ok, [str(f) for f in report.findings]
