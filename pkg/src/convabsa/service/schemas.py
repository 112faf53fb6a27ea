"""Request and response models for the HTTP service.

Corpora travel as record-per-line text in request bodies, so the
service stays stateless: all file I/O belongs to the clients.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class FindingModel(BaseModel):
    rule: str
    message: str
    severity: str = "error"
    utterance: int | None = None
    line: int | None = None


class CorpusRequest(BaseModel):
    records: str


class ValidateResponse(BaseModel):
    ok: bool
    dialogues: int
    findings: list[FindingModel]


class StatsResponse(BaseModel):
    dialogue_count: int
    utterance_count: int
    speaker_count: int
    sextuple_count: int
    flip_count: int
    modality_counts: dict[str, int]
    manner_counts: dict[str, int]
    findings: list[FindingModel]


class SplitRequest(BaseModel):
    records: str
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0


class SplitResponse(BaseModel):
    train: str
    dev: str
    test: str
    sizes: tuple[int, int, int]


class PRFModel(BaseModel):
    precision: float
    recall: float
    f1: float


class ElementScoreModel(BaseModel):
    exact: PRFModel
    relevant: PRFModel
    combined: PRFModel
    pooled: PRFModel


class ScoreReportModel(BaseModel):
    elements: dict[str, ElementScoreModel]
    sentiment_macro_f1: float
    pairs: dict[str, PRFModel]
    sextuple_micro: PRFModel
    sextuple_identification: PRFModel


class FlipReportModel(BaseModel):
    flip: PRFModel
    trigger_macro_f1: float
    per_trigger_f1: dict[str, float]
    flip_trig: PRFModel


class BackendConfigModel(BaseModel):
    type: Literal["http", "scripted", "constant"]
    endpoint: str = ""
    model: str = ""
    credential_env: str = ""
    timeout: float = 30.0
    temperature: float = 0.0
    table: dict[str, Any] | None = None
    path: str = ""
    text: str = ""


class ScoreRequest(BaseModel):
    pred: str
    gold: str
    judge: Literal["offline", "remote"] = "offline"
    judge_backend: BackendConfigModel | None = None


class ScoreResponse(BaseModel):
    report: ScoreReportModel
    flip_report: FlipReportModel


class DerivedFlipModel(BaseModel):
    holder: str
    target: str
    aspect: str
    initial: str
    flipped: str


class DialogueFlipsModel(BaseModel):
    doc_id: str
    derived: list[DerivedFlipModel]
    findings: list[FindingModel]


class DeriveFlipsResponse(BaseModel):
    dialogues: list[DialogueFlipsModel]
    consistent: bool


class PipelineRequest(BaseModel):
    records: str
    backend: BackendConfigModel
    judge_backend: BackendConfigModel | None = None
    verify: bool = True
    max_retries: int = Field(default=3, ge=0)
    parallel: int = Field(default=1, ge=1)


class StepAttemptModel(BaseModel):
    completion: str | None = None
    error: str | None = None
    verdict: bool | None = None
    verdict_error: str | None = None


class StepTraceModel(BaseModel):
    step_id: str
    prompt: str
    attempts: list[StepAttemptModel]
    parsed: list[list[str]] | None = None
    retry_count: int
    flagged: bool
    notes: list[str]


class DialogueRunModel(BaseModel):
    doc_id: str
    sextuples: list[dict[str, Any]]
    flips: list[dict[str, Any]]
    traces: list[StepTraceModel]
    error: str | None = None


class PipelineResponse(BaseModel):
    results: list[DialogueRunModel]


class SynthPromptRequest(BaseModel):
    theme: str
    speakers: int
    turns: int
    modality_plan: list[str] = Field(default_factory=list)
    sample_record: str = ""


class SynthPromptResponse(BaseModel):
    prompt: str


class CandidateModel(BaseModel):
    id: str
    caption: str


class RetrieveRequest(BaseModel):
    query: str
    candidates: list[CandidateModel]
    k: int = 10


class RetrieveResponse(BaseModel):
    ranked: list[str]


class ElectRequest(BaseModel):
    scores: list[list[float]]


class ElectResponse(BaseModel):
    elected: int


class HealthResponse(BaseModel):
    status: str
    version: str
