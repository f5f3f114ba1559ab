from .client import (
    AuthMissing,
    CompletionRequest,
    DiskCache,
    LLMClient,
    MockProvider,
    OpenAICompatibleProvider,
    ProviderFailure,
    RateLimiter,
    TransientError,
    cached_complete,
    complete,
)
from .parsing import SubjectResponse, UnparsableResponse, parse_feature_response, parse_subject_response
from .prompts import (
    CONDITIONS,
    MissingText,
    Personality,
    load_personalities,
    render_feature_prompt,
    render_finetune_prompt,
    render_subject_prompt,
)
from .subjects import aggregate_subject_predictions, run_subject_session, run_subjects, score_matrix

__all__ = [
    "AuthMissing",
    "CONDITIONS",
    "CompletionRequest",
    "DiskCache",
    "LLMClient",
    "MissingText",
    "MockProvider",
    "OpenAICompatibleProvider",
    "Personality",
    "ProviderFailure",
    "RateLimiter",
    "SubjectResponse",
    "TransientError",
    "UnparsableResponse",
    "aggregate_subject_predictions",
    "cached_complete",
    "complete",
    "load_personalities",
    "parse_feature_response",
    "parse_subject_response",
    "render_feature_prompt",
    "render_finetune_prompt",
    "render_subject_prompt",
    "run_subject_session",
    "run_subjects",
    "score_matrix",
]
