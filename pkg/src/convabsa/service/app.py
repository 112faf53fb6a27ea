"""HTTP service exposing the toolkit's operations.

Thin wrappers over the core package: requests carry corpora inline,
responses mirror the report structures.  Invalid corpora yield 400 with
the validation findings; completion-backend failures yield 502.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..corpus import (
    Corpus,
    corpus_stats,
    parse_corpus,
    record_to_dict,
    serialize_corpus,
    split_corpus,
)
from ..dialogue import AnnotatedDialogue, ValidationReport
from ..flips import check_flip_consistency, derive_flips
from ..metrics import ScoringError, score_corpus
from ..pipeline import (
    BackendConfig,
    BackendError,
    PipelineConfig,
    judge_from_backend,
    run_corpus,
)
from ..synthesis import build_generation_prompt, elect_candidate, retrieval_rank
from . import schemas


def _findings(report: ValidationReport) -> list[schemas.FindingModel]:
    return [schemas.FindingModel(**f.to_dict()) for f in report.findings]


def _parse_or_400(records: str, what: str) -> tuple[Corpus, ValidationReport]:
    corpus, report = parse_corpus(records)
    if not report.ok:
        raise HTTPException(
            status_code=400,
            detail={
                "message": f"{what} corpus has invalid records",
                "findings": [f.to_dict() for f in report.errors],
            },
        )
    return corpus, report


def _build_backend(config: schemas.BackendConfigModel):
    try:
        return BackendConfig.from_dict(config.model_dump()).build()
    except (ValueError, OSError) as e:
        raise HTTPException(status_code=400, detail=f"bad backend config: {e}") from e


def create_app() -> FastAPI:
    app = FastAPI(title="convabsa", version=__version__)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/corpus/validate", response_model=schemas.ValidateResponse)
    def validate(request: schemas.CorpusRequest) -> schemas.ValidateResponse:
        corpus, report = parse_corpus(request.records)
        return schemas.ValidateResponse(
            ok=report.ok, dialogues=len(corpus), findings=_findings(report)
        )

    @app.post("/corpus/stats", response_model=schemas.StatsResponse)
    def stats(request: schemas.CorpusRequest) -> schemas.StatsResponse:
        corpus, report = parse_corpus(request.records)
        return schemas.StatsResponse(**corpus_stats(corpus).to_dict(), findings=_findings(report))

    @app.post("/corpus/split", response_model=schemas.SplitResponse)
    def split(request: schemas.SplitRequest) -> schemas.SplitResponse:
        corpus, _ = _parse_or_400(request.records, "input")
        try:
            train, dev, test = split_corpus(corpus, request.ratios, request.seed)
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        return schemas.SplitResponse(
            train=serialize_corpus(train).decode("utf-8"),
            dev=serialize_corpus(dev).decode("utf-8"),
            test=serialize_corpus(test).decode("utf-8"),
            sizes=(len(train), len(dev), len(test)),
        )

    @app.post("/score", response_model=schemas.ScoreResponse)
    def score(request: schemas.ScoreRequest) -> schemas.ScoreResponse:
        pred, _ = _parse_or_400(request.pred, "prediction")
        gold, _ = _parse_or_400(request.gold, "gold")
        judge = None
        if request.judge == "remote":
            if request.judge_backend is None:
                raise HTTPException(
                    status_code=400, detail="remote judge requires a judge_backend config"
                )
            judge = judge_from_backend(_build_backend(request.judge_backend))
        try:
            report, flip_report = score_corpus(pred, gold, judge)
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        except (ScoringError, BackendError) as e:
            raise HTTPException(status_code=502, detail=str(e)) from e
        return schemas.ScoreResponse(
            report=schemas.ScoreReportModel(**report.to_dict()),
            flip_report=schemas.FlipReportModel(**flip_report.to_dict()),
        )

    @app.post("/flips/derive", response_model=schemas.DeriveFlipsResponse)
    def flips(request: schemas.CorpusRequest) -> schemas.DeriveFlipsResponse:
        corpus, _ = _parse_or_400(request.records, "input")
        dialogues = []
        consistent = True
        for ad in corpus.dialogues:
            derived = derive_flips(ad)
            report = check_flip_consistency(ad)
            consistent = consistent and report.ok
            dialogues.append(
                schemas.DialogueFlipsModel(
                    doc_id=ad.dialogue.doc_id,
                    derived=[
                        schemas.DerivedFlipModel(
                            holder=f.holder,
                            target=f.target,
                            aspect=f.aspect,
                            initial=f.initial.value,
                            flipped=f.flipped.value,
                        )
                        for f in derived
                    ],
                    findings=_findings(report),
                )
            )
        return schemas.DeriveFlipsResponse(dialogues=dialogues, consistent=consistent)

    @app.post("/pipeline/run", response_model=schemas.PipelineResponse)
    def pipeline(request: schemas.PipelineRequest) -> schemas.PipelineResponse:
        corpus, _ = _parse_or_400(request.records, "input")
        backend = _build_backend(request.backend)
        judge_backend = (
            _build_backend(request.judge_backend) if request.judge_backend is not None else None
        )
        cfg = PipelineConfig(
            backend=backend,
            judge_backend=judge_backend,
            verify=request.verify,
            max_retries=request.max_retries,
            parallel=request.parallel,
        )
        runs = run_corpus(corpus.dialogues, cfg)
        results = []
        for ad, run in zip(corpus.dialogues, runs):
            as_record = record_to_dict(
                AnnotatedDialogue(ad.dialogue, tuple(run.sextuples), tuple(run.flips))
            )
            results.append(
                schemas.DialogueRunModel(
                    doc_id=run.doc_id,
                    sextuples=as_record["sextuples"],
                    flips=as_record["flips"],
                    traces=[schemas.StepTraceModel(**t.to_dict()) for t in run.traces],
                    error=run.error,
                )
            )
        return schemas.PipelineResponse(results=results)

    @app.post("/synthesis/prompt", response_model=schemas.SynthPromptResponse)
    def synth_prompt(request: schemas.SynthPromptRequest) -> schemas.SynthPromptResponse:
        try:
            prompt = build_generation_prompt(
                request.theme,
                request.speakers,
                request.turns,
                request.modality_plan,
                request.sample_record,
            )
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        return schemas.SynthPromptResponse(prompt=prompt)

    @app.post("/retrieval/rank", response_model=schemas.RetrieveResponse)
    def retrieve(request: schemas.RetrieveRequest) -> schemas.RetrieveResponse:
        try:
            ranked = retrieval_rank(
                request.query, [(c.id, c.caption) for c in request.candidates], request.k
            )
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        return schemas.RetrieveResponse(ranked=ranked)

    @app.post("/retrieval/elect", response_model=schemas.ElectResponse)
    def elect(request: schemas.ElectRequest) -> schemas.ElectResponse:
        try:
            elected = elect_candidate(request.scores)
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        return schemas.ElectResponse(elected=elected)

    return app


app = create_app()
