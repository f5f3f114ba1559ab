"""Squared-error metrics over choice proportions."""

from __future__ import annotations

from typing import Sequence

import numpy as np


class LengthMismatch(ValueError):
    pass


class RangeViolation(ValueError):
    pass


def mse(predictions: Sequence[float], labels: Sequence[float]) -> float:
    """Mean squared error between predicted and observed proportions."""
    p = np.asarray(predictions, dtype=float)
    y = np.asarray(labels, dtype=float)
    if p.shape != y.shape or p.ndim != 1:
        raise LengthMismatch(f"{p.shape} predictions vs {y.shape} labels")
    if p.size == 0:
        raise LengthMismatch("mse needs at least one value")
    for name, arr in (("predictions", p), ("labels", y)):
        if not np.all((arr >= 0.0) & (arr <= 1.0)):
            raise RangeViolation(f"{name} must lie in [0, 1]")
    return float(np.mean((p - y) ** 2))
