"""Validation-based model selection and prediction averaging."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..metrics import LengthMismatch, mse
from .models import FittedModel, RegressorSpec, fit_regressor, predict

logger = logging.getLogger(__name__)


class GridSearchFailed(RuntimeError):
    pass


@dataclass
class LeaderboardRow:
    spec: RegressorSpec
    val_mse: Optional[float]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def grid_search(
    specs: Sequence[RegressorSpec], X_train, y_train, X_val, y_val, seed: int = 0
) -> tuple[FittedModel, list[LeaderboardRow]]:
    """Fit every spec on the training rows and keep the lowest validation MSE.

    Ties go to the earliest spec. A spec that fails to fit is recorded on the
    leaderboard rather than aborting the search.
    """
    if not specs:
        raise ValueError("grid_search needs at least one spec")
    best: Optional[FittedModel] = None
    best_score = np.inf
    board = []
    for spec in specs:
        try:
            model = fit_regressor(spec, X_train, y_train, seed)
            score = mse(predict(model, X_val), y_val)
        except Exception as exc:  # noqa: BLE001 - per-spec failures are reported, not raised
            logger.warning("spec %s failed: %s", spec.label, exc)
            board.append(LeaderboardRow(spec, None, f"{type(exc).__name__}: {exc}"))
            continue
        board.append(LeaderboardRow(spec, score))
        if score < best_score:
            best, best_score = model, score
    if best is None:
        detail = "; ".join(f"{r.spec.label}: {r.error}" for r in board)
        raise GridSearchFailed(f"every spec failed to fit ({detail})")
    return best, board


def expand_grid(kind: str, **grid) -> list[RegressorSpec]:
    """Cartesian product of hyperparameter lists, in the order given."""
    keys = list(grid)
    return [RegressorSpec(kind, dict(zip(keys, vals))) for vals in itertools.product(*(grid[k] for k in keys))]


def ensemble_average(predictions: Sequence[Sequence[float]]) -> np.ndarray:
    """Componentwise mean of k prediction vectors."""
    if len(predictions) == 0:
        raise ValueError("need at least one predictor")
    lengths = {len(p) for p in predictions}
    if len(lengths) != 1:
        raise LengthMismatch(f"prediction vectors have lengths {sorted(lengths)}")
    return np.mean(np.asarray(predictions, dtype=float), axis=0)
