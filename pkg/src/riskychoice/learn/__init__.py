from .embeddings import EmbeddingStore, embed_tasks, embed_text, task_representation
from .models import (
    DimensionMismatch,
    FittedModel,
    InvalidHyperparameter,
    RegressorSpec,
    SingularSystem,
    fit_regressor,
    load_model,
    predict,
    save_model,
)
from .pca import DegenerateData, PCATransform, pca_apply, pca_fit, pca_inverse
from .search import GridSearchFailed, LeaderboardRow, ensemble_average, expand_grid, grid_search

__all__ = [
    "DegenerateData",
    "DimensionMismatch",
    "EmbeddingStore",
    "FittedModel",
    "GridSearchFailed",
    "InvalidHyperparameter",
    "LeaderboardRow",
    "PCATransform",
    "RegressorSpec",
    "SingularSystem",
    "embed_tasks",
    "embed_text",
    "ensemble_average",
    "expand_grid",
    "fit_regressor",
    "grid_search",
    "load_model",
    "pca_apply",
    "pca_fit",
    "pca_inverse",
    "predict",
    "save_model",
    "task_representation",
]
