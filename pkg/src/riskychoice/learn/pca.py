"""Principal component analysis on the centered covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateData(ValueError):
    pass


@dataclass(frozen=True)
class PCATransform:
    mean: np.ndarray
    components: np.ndarray  # (k, d), rows ordered by decreasing variance
    explained_variance: np.ndarray
    total_variance: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def retained_variance_ratio(self) -> float:
        return float(self.explained_variance.sum() / self.total_variance)


def n_retained(retain_fraction: float, input_dim: int) -> int:
    # 1e-9 absorbs representation error, e.g. 0.33 * 300 evaluating to 98.99999...
    return max(1, math.floor(retain_fraction * input_dim + 1e-9))


def pca_fit(X, retain_fraction: float) -> PCATransform:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("PCA needs a matrix with at least two rows")
    if not 0 < retain_fraction <= 1:
        raise ValueError("retain_fraction must lie in (0, 1]")
    n, d = X.shape
    k = n_retained(retain_fraction, d)
    mean = X.mean(axis=0)
    Xc = X - mean
    total = float((Xc**2).sum() / (n - 1))
    if total <= 0:
        raise DegenerateData("data has zero variance in every direction")
    if k <= min(n, d):
        # right singular vectors of the centered data are the covariance eigenvectors
        _, s, vt = np.linalg.svd(Xc, full_matrices=False)
        comps, var = vt[:k], s[:k] ** 2 / (n - 1)
    else:
        evals, evecs = np.linalg.eigh(Xc.T @ Xc / (n - 1))
        order = np.argsort(evals)[::-1][:k]
        comps, var = evecs[:, order].T, np.maximum(evals[order], 0.0)
    # sign convention: largest-magnitude loading of each component is positive
    signs = np.sign(comps[np.arange(k), np.argmax(np.abs(comps), axis=1)])
    comps = comps * np.where(signs == 0, 1.0, signs)[:, None]
    return PCATransform(mean, comps, var, total)


def pca_apply(transform: PCATransform, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != transform.mean.shape[0]:
        raise ValueError(f"expected {transform.mean.shape[0]} columns, got {X.shape[-1]}")
    return (X - transform.mean) @ transform.components.T


def pca_inverse(transform: PCATransform, Z) -> np.ndarray:
    return np.asarray(Z, dtype=float) @ transform.components + transform.mean
