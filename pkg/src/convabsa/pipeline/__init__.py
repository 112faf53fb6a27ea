"""Chained reasoning pipeline: templates, parsing, backends, and the runner."""

from .backends import (
    BackendConfig,
    BackendError,
    ConstantBackend,
    HTTPBackend,
    ModelBackend,
    QueueBackend,
    ScriptedBackend,
    prompt_hash,
)
from .parsing import (
    NONE,
    ArityMismatch,
    InvalidLabel,
    NoTuplesFound,
    TupleParseError,
    UnbalancedParentheses,
    format_tuple_list,
    parse_tuple_list,
)
from .runner import (
    CosResult,
    DialogueRun,
    PipelineConfig,
    PipelineError,
    StepAttempt,
    StepTrace,
    VerificationParseError,
    always_entail_verifier,
    build_gold_replay_backend,
    element_from_text,
    gold_step_fields,
    judge_from_backend,
    locate_span,
    rotate_sentiment,
    run_corpus,
    run_cos,
    verify,
)
from .templates import (
    TEMPLATES,
    PromptTemplate,
    build_judge_prompt,
    build_step_prompt,
    build_verify_prompt,
    paraphrase_tuples,
    render_dialogue,
)

__all__ = [
    "NONE",
    "TEMPLATES",
    "ArityMismatch",
    "BackendConfig",
    "BackendError",
    "ConstantBackend",
    "CosResult",
    "DialogueRun",
    "HTTPBackend",
    "InvalidLabel",
    "ModelBackend",
    "NoTuplesFound",
    "PipelineConfig",
    "PipelineError",
    "PromptTemplate",
    "QueueBackend",
    "ScriptedBackend",
    "StepAttempt",
    "StepTrace",
    "TupleParseError",
    "UnbalancedParentheses",
    "VerificationParseError",
    "always_entail_verifier",
    "build_gold_replay_backend",
    "build_judge_prompt",
    "build_step_prompt",
    "build_verify_prompt",
    "element_from_text",
    "format_tuple_list",
    "gold_step_fields",
    "judge_from_backend",
    "locate_span",
    "parse_tuple_list",
    "paraphrase_tuples",
    "prompt_hash",
    "render_dialogue",
    "rotate_sentiment",
    "run_corpus",
    "run_cos",
    "verify",
]
