"""Orchestration of the four-step reasoning chain with verification.

Each step renders its prompt from the dialogue and the previous step's
verified output, parses the completion into tuples, and (when enabled)
checks a paraphrased claim against the dialogue.  A contradicted step
reruns up to the retry budget; when the budget is exhausted the last
successful parse is kept but flagged, preserving recall while staying
auditable.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, NamedTuple, Sequence

from ..dialogue import (
    AnnotatedDialogue,
    Dialogue,
    Element,
    FlipRecord,
    Manner,
    Sentiment,
    Sextuple,
    Span,
    TriggerType,
)
from ..textnorm import normalize_term, tokenize
from .backends import BackendError, ConstantBackend, ModelBackend, ScriptedBackend
from .parsing import (
    TupleParseError,
    format_tuple_list,
    parse_tuple_list,
)
from .templates import (
    build_judge_prompt,
    build_step_prompt,
    build_verify_prompt,
    paraphrase_tuples,
    render_dialogue,
)

_STEP_ARITY = {1: 2, 2: 4, 3: 6, 4: 6}
_STEP_SENTIMENT_POSITIONS = {1: frozenset(), 2: frozenset(), 3: frozenset({4}), 4: frozenset({3, 4})}
_STEP_TRIGGER_POSITIONS = {4: frozenset({5})}


class VerificationParseError(RuntimeError):
    """The verifier returned neither a leading '1' nor a leading '0'."""

    def __init__(self, completion: str):
        super().__init__(f"unparseable verification verdict: {completion!r}")
        self.completion = completion


class PipelineError(RuntimeError):
    """Unrecoverable step failure; carries the traces gathered so far."""

    def __init__(self, message: str, traces: list["StepTrace"]):
        super().__init__(message)
        self.traces = traces


@dataclass(frozen=True)
class PipelineConfig:
    backend: ModelBackend
    judge_backend: ModelBackend | None = None
    verify: bool = True
    max_retries: int = 3
    parallel: int = 1

    def verifier(self) -> ModelBackend:
        return self.judge_backend if self.judge_backend is not None else self.backend


@dataclass(frozen=True)
class StepAttempt:
    completion: str | None = None
    error: str | None = None
    verdict: bool | None = None
    verdict_error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "completion": self.completion,
            "error": self.error,
            "verdict": self.verdict,
            "verdict_error": self.verdict_error,
        }


@dataclass
class StepTrace:
    step_id: str
    prompt: str
    attempts: list[StepAttempt] = field(default_factory=list)
    parsed: list[tuple[str, ...]] | None = None
    flagged: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def retry_count(self) -> int:
        return max(0, len(self.attempts) - 1)

    @property
    def completion(self) -> str | None:
        for attempt in reversed(self.attempts):
            if attempt.completion is not None:
                return attempt.completion
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "step_id": self.step_id,
            "prompt": self.prompt,
            "attempts": [a.to_dict() for a in self.attempts],
            "parsed": [list(t) for t in self.parsed] if self.parsed is not None else None,
            "retry_count": self.retry_count,
            "flagged": self.flagged,
            "notes": self.notes,
        }


class CosResult(NamedTuple):
    sextuples: list[Sextuple]
    flips: list[FlipRecord]
    traces: list[StepTrace]


def verify(
    claim: str, dialogue_text: str, backend: ModelBackend, *, step: int = 1
) -> bool:
    """Entailment check of a claim against the dialogue: '1' yes, '0' no."""
    completion = backend.complete(build_verify_prompt(step, claim, dialogue_text))
    trimmed = completion.strip()
    if trimmed.startswith("1"):
        return True
    if trimmed.startswith("0"):
        return False
    raise VerificationParseError(completion)


def judge_from_backend(backend: ModelBackend) -> Callable[[str, str, str], bool]:
    """Semantic judge that asks the backend whether two terms coincide."""

    def judge(context: str, pred: str, gold: str) -> bool:
        completion = backend.complete(build_judge_prompt(context, pred, gold))
        trimmed = completion.strip()
        if trimmed.startswith("1"):
            return True
        if trimmed.startswith("0"):
            return False
        raise VerificationParseError(completion)

    return judge


def locate_span(dialogue: Dialogue, value: str) -> Span | None:
    """First token window whose normalized text equals the value, if any."""
    target = normalize_term(value)
    if not target:
        return None
    width = len(target.split(" "))
    for utt in dialogue.utterances:
        tokens = tokenize(utt.text)
        for start in range(0, len(tokens) - width + 1):
            window = " ".join(tokens[start : start + width])
            if normalize_term(window) == target:
                return Span(utt.index, start, start + width)
    return None


def element_from_text(dialogue: Dialogue, value: str) -> Element:
    """Build a predicted element, inferring manner from text occurrence."""
    span = locate_span(dialogue, value)
    if span is None:
        return Element(value, Manner.IMPLICIT)
    return Element(value, Manner.EXPLICIT, span)


def _sextuple_from_fields(dialogue: Dialogue, fields: Sequence[str]) -> Sextuple:
    return Sextuple(
        element_from_text(dialogue, fields[0]),
        element_from_text(dialogue, fields[1]),
        element_from_text(dialogue, fields[2]),
        element_from_text(dialogue, fields[3]),
        Sentiment.parse(fields[4]),
        element_from_text(dialogue, fields[5]),
    )


def _flip_from_fields(fields: Sequence[str]) -> FlipRecord:
    return FlipRecord(
        fields[0],
        fields[1],
        fields[2],
        Sentiment.parse(fields[3]),
        Sentiment.parse(fields[4]),
        TriggerType.parse(fields[5]),
    )


def _validate_step4(tuples: list[tuple[str, ...]]) -> None:
    for fields in tuples:
        if Sentiment.parse(fields[3]) is Sentiment.parse(fields[4]):
            raise TupleParseError(
                "flip must change sentiment; initial equals flipped",
                fragment=", ".join(fields),
            )


def _run_step(
    step: int,
    prompt: str,
    dialogue_text: str,
    cfg: PipelineConfig,
    traces: list[StepTrace],
) -> list[tuple[str, ...]] | None:
    trace = StepTrace(step_id=f"P{step}", prompt=prompt)
    traces.append(trace)
    allow_none = step == 4
    last_parsed: list[tuple[str, ...]] | None = None
    have_parse = False
    for attempt in range(cfg.max_retries + 1):
        final = attempt == cfg.max_retries
        try:
            completion = cfg.backend.complete(prompt)
        except BackendError as e:
            trace.attempts.append(StepAttempt(error=f"backend: {e}"))
            if final:
                raise PipelineError(f"step {step}: backend failed: {e}", traces) from e
            continue
        try:
            parsed = parse_tuple_list(
                completion,
                _STEP_ARITY[step],
                _STEP_SENTIMENT_POSITIONS[step],
                _STEP_TRIGGER_POSITIONS.get(step, frozenset()),
                allow_none=allow_none,
            )
            if step == 4 and parsed is not None:
                _validate_step4(parsed)
        except TupleParseError as e:
            trace.attempts.append(StepAttempt(completion=completion, error=f"parse: {e}"))
            if final:
                if have_parse:
                    trace.flagged = True
                    trace.notes.append("final attempt unparseable; kept last good parse")
                    trace.parsed = last_parsed
                    return last_parsed
                raise PipelineError(f"step {step}: unparseable completion: {e}", traces) from e
            continue
        last_parsed = parsed
        have_parse = True
        if not cfg.verify or not parsed:
            trace.attempts.append(StepAttempt(completion=completion))
            trace.parsed = parsed
            return parsed
        claim = paraphrase_tuples(step, parsed)
        try:
            verdict = verify(claim, dialogue_text, cfg.verifier(), step=step)
            verdict_error = None
        except VerificationParseError as e:
            # Unparseable verdicts count as contradictions.
            verdict = False
            verdict_error = str(e)
        except BackendError as e:
            trace.attempts.append(StepAttempt(completion=completion, verdict_error=f"backend: {e}"))
            if final:
                raise PipelineError(f"step {step}: verifier backend failed: {e}", traces) from e
            continue
        trace.attempts.append(
            StepAttempt(completion=completion, verdict=verdict, verdict_error=verdict_error)
        )
        if verdict:
            trace.parsed = parsed
            return parsed
        if final:
            trace.flagged = True
            trace.notes.append("verification still contradicted at retry budget; kept last parse")
            trace.parsed = parsed
            return parsed
    raise PipelineError(f"step {step}: no attempts executed", traces)


def _triple_set(tuples: Iterable[tuple[str, ...]]) -> set[tuple[str, str, str]]:
    return {
        (normalize_term(t[0]), normalize_term(t[1]), normalize_term(t[2])) for t in tuples
    }


def run_cos(dialogue: Dialogue, cfg: PipelineConfig) -> CosResult:
    """Run the four reasoning steps over one dialogue.

    Returns the extracted sextuples, the flip records (empty when step
    4 answers "None"), and one trace per step capturing every attempt.
    """
    traces: list[StepTrace] = []
    dialogue_text = render_dialogue(dialogue)

    prompt1 = build_step_prompt(1, dialogue_text)
    pairs = _run_step(1, prompt1, dialogue_text, cfg, traces)

    prompt2 = build_step_prompt(2, dialogue_text, format_tuple_list(pairs))
    quads = _run_step(2, prompt2, dialogue_text, cfg, traces)

    prompt3 = build_step_prompt(3, dialogue_text, format_tuple_list(quads))
    sextuple_fields = _run_step(3, prompt3, dialogue_text, cfg, traces)
    missing = _triple_set(sextuple_fields or []) - _triple_set(
        (q[0], q[1], q[2]) for q in (quads or [])
    )
    if missing:
        traces[-1].notes.append(
            "holder-target-aspect triples absent from the previous step: "
            + ", ".join(map(str, sorted(missing)))
        )

    prompt4 = build_step_prompt(4, dialogue_text, format_tuple_list(sextuple_fields))
    flip_fields = _run_step(4, prompt4, dialogue_text, cfg, traces)

    sextuples = [_sextuple_from_fields(dialogue, f) for f in (sextuple_fields or [])]
    flips = [_flip_from_fields(f) for f in (flip_fields or [])]
    return CosResult(sextuples, flips, traces)


@dataclass
class DialogueRun:
    doc_id: str
    sextuples: list[Sextuple] = field(default_factory=list)
    flips: list[FlipRecord] = field(default_factory=list)
    traces: list[StepTrace] = field(default_factory=list)
    error: str | None = None


def run_corpus(
    dialogues: Iterable[AnnotatedDialogue | Dialogue], cfg: PipelineConfig
) -> list[DialogueRun]:
    """Run the chain over many dialogues, bounded by ``cfg.parallel``."""

    def plain(d: AnnotatedDialogue | Dialogue) -> Dialogue:
        return d.dialogue if isinstance(d, AnnotatedDialogue) else d

    def one(d: Dialogue) -> DialogueRun:
        try:
            result = run_cos(d, cfg)
            return DialogueRun(d.doc_id, result.sextuples, result.flips, result.traces)
        except PipelineError as e:
            return DialogueRun(d.doc_id, traces=e.traces, error=str(e))

    items = [plain(d) for d in dialogues]
    if cfg.parallel <= 1:
        return [one(d) for d in items]
    with ThreadPoolExecutor(max_workers=cfg.parallel) as pool:
        return list(pool.map(one, items))


def _dedupe(rows: Iterable[tuple[str, ...]]) -> list[tuple[str, ...]]:
    seen = set()
    out = []
    for row in rows:
        if row not in seen:
            seen.add(row)
            out.append(row)
    return out


def gold_step_fields(ad: AnnotatedDialogue, step: int) -> list[tuple[str, ...]]:
    """The tuple rows a faithful model would emit for one step."""
    if step == 1:
        return _dedupe((s.target.value, s.aspect.value) for s in ad.sextuples)
    if step == 2:
        return _dedupe(
            (s.holder.value, s.target.value, s.aspect.value, s.opinion.value)
            for s in ad.sextuples
        )
    if step == 3:
        return _dedupe(
            (
                s.holder.value,
                s.target.value,
                s.aspect.value,
                s.opinion.value,
                s.sentiment.value,
                s.rationale.value,
            )
            for s in ad.sextuples
        )
    if step == 4:
        return [
            (f.holder, f.target, f.aspect, f.initial.value, f.flipped.value, f.trigger.label)
            for f in ad.flips
        ]
    raise ValueError(f"unknown step: {step}")


def build_gold_replay_backend(
    dialogues: Iterable[AnnotatedDialogue],
    sentiment_map: Callable[[str], str] | None = None,
    include_verification: bool = True,
) -> ScriptedBackend:
    """Scripted backend whose completions replay the gold annotations.

    ``sentiment_map`` optionally rewrites the sentiment field of step-3
    rows, producing a sentiment-corrupting variant; step 4 still
    replays the annotated flips.  Verification prompts answer "1".
    """
    table: dict[str, str] = {}
    for ad in dialogues:
        dialogue_text = render_dialogue(ad.dialogue)
        fields_by_step = {step: gold_step_fields(ad, step) for step in (1, 2, 3, 4)}
        if sentiment_map is not None:
            fields_by_step[3] = [
                row[:4] + (sentiment_map(row[4]),) + row[5:] for row in fields_by_step[3]
            ]
        completions = {step: format_tuple_list(fields_by_step[step]) for step in (1, 2, 3, 4)}
        prior = {2: completions[1], 3: completions[2], 4: completions[3]}
        for step in (1, 2, 3, 4):
            prompt = build_step_prompt(step, dialogue_text, prior.get(step))
            table[prompt] = completions[step]
            if include_verification and fields_by_step[step]:
                claim = paraphrase_tuples(step, fields_by_step[step])
                table[build_verify_prompt(step, claim, dialogue_text)] = "1"
    return ScriptedBackend(table, hashed=False)


def rotate_sentiment(label: str) -> str:
    """Deterministic wrong-sentiment rewrite used by corrupting replays."""
    order = [Sentiment.POSITIVE, Sentiment.NEGATIVE, Sentiment.NEUTRAL]
    current = Sentiment.parse(label)
    return order[(order.index(current) + 1) % 3].value


def always_entail_verifier() -> ModelBackend:
    return ConstantBackend("1")
