"""Regressor zoo behind one ``fit_regressor`` / ``predict`` surface.

Kinds: ``ridge``, ``linear``, ``lasso``, ``knn``, ``svr`` (kernel ridge with
an RBF kernel standing in for epsilon-SVR), ``mlp``, ``gbt`` and
``constant``. Predictions are clamped to [0, 1].
"""

from __future__ import annotations

import logging
import pickle
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from .gbt import fit_gbt, predict_gbt
from .mlp import fit_mlp, predict_mlp

logger = logging.getLogger(__name__)

MODEL_FORMAT = "riskychoice-model"
MODEL_VERSION = 1


class InvalidHyperparameter(ValueError):
    pass


class SingularSystem(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


DEFAULTS: dict[str, dict[str, Any]] = {
    "ridge": {"alpha": 1.0, "fit_intercept": True},
    "linear": {"fit_intercept": True},
    "lasso": {"alpha": 0.001, "fit_intercept": True, "max_iter": 10_000, "tol": 1e-8},
    "knn": {"k": 5},
    "svr": {"C": 0.1, "gamma": "auto", "epsilon": 0.1, "kernel": "rbf"},
    "mlp": {
        "hidden": (64, 128),
        "dropout": 0.6,
        "batch_size": 64,
        "learning_rate": 0.01,
        "weight_decay": 0.001,
        "epochs": 200,
        "standardize": True,
    },
    "gbt": {
        "n_estimators": 100,
        "max_depth": 10,
        "learning_rate": 0.05,
        "min_child_weight": 5.0,
        "subsample": 0.6,
        "colsample_bytree": 0.7,
        "colsample_bylevel": 0.4,
        "reg_lambda": 0.01,
        "reg_alpha": 0.01,
        "gamma": 0.0,
        "max_delta_step": 0.0,
    },
    "constant": {},
}

# accepted for config compatibility but without effect here
IGNORED = {
    "gbt": {"scale_pos_weight", "objective", "booster", "tree_method", "n_jobs", "verbosity"},
    "svr": {"epsilon"},
}


def _check(cond: bool, msg: str):
    if not cond:
        raise InvalidHyperparameter(msg)


def _validate(kind: str, hp: dict) -> None:
    if kind in ("ridge", "lasso"):
        _check(hp["alpha"] >= 0, "alpha must be >= 0")
    if kind == "knn":
        _check(int(hp["k"]) == hp["k"] and hp["k"] >= 1, "k must be a positive integer")
    if kind == "svr":
        _check(hp["C"] > 0, "C must be positive")
        _check(hp["kernel"] == "rbf", "only the rbf kernel is supported")
        _check(hp["gamma"] in ("auto", "scale") or float(hp["gamma"]) > 0, "gamma must be 'auto', 'scale' or > 0")
    if kind == "mlp":
        _check(len(hp["hidden"]) >= 1 and all(int(h) > 0 for h in hp["hidden"]), "layer sizes must be positive")
        _check(0 <= hp["dropout"] < 1, "dropout must lie in [0, 1)")
        _check(hp["batch_size"] >= 1 and hp["epochs"] >= 1, "batch_size and epochs must be positive")
        _check(hp["learning_rate"] > 0 and hp["weight_decay"] >= 0, "bad optimizer settings")
    if kind == "gbt":
        _check(hp["n_estimators"] >= 1 and hp["max_depth"] >= 0, "n_estimators >= 1 and max_depth >= 0")
        _check(0 < hp["learning_rate"], "learning_rate must be positive")
        _check(0 < hp["subsample"] <= 1, "subsample must lie in (0, 1]")
        _check(0 < hp["colsample_bytree"] <= 1 and 0 < hp["colsample_bylevel"] <= 1, "colsample in (0, 1]")
        _check(hp["min_child_weight"] >= 0 and hp["reg_lambda"] >= 0 and hp["reg_alpha"] >= 0, "negative penalty")


@dataclass(frozen=True)
class RegressorSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in DEFAULTS:
            raise InvalidHyperparameter(f"unknown regressor kind {self.kind!r}")
        known = set(DEFAULTS[self.kind]) | IGNORED.get(self.kind, set())
        unknown = set(self.hyperparameters) - known
        if unknown:
            raise InvalidHyperparameter(f"{self.kind}: unknown hyperparameters {sorted(unknown)}")
        _validate(self.kind, self.resolved())

    def resolved(self) -> dict:
        hp = dict(DEFAULTS[self.kind])
        hp.update(self.hyperparameters)
        return hp

    @property
    def label(self) -> str:
        if not self.hyperparameters:
            return self.kind
        args = ",".join(f"{k}={v}" for k, v in sorted(self.hyperparameters.items()))
        return f"{self.kind}({args})"


@dataclass
class FittedModel:
    spec: RegressorSpec
    state: Any
    input_dim: int
    seed: int
    fitted_at: float
    notes: list = field(default_factory=list)

    def predict_raw(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.input_dim:
            raise DimensionMismatch(f"model expects {self.input_dim} columns, got {X.shape[1]}")
        return _PREDICT[self.spec.kind](self.state, X)

    @property
    def weights(self):
        return self.state.get("w") if isinstance(self.state, dict) else None

    @property
    def intercept(self):
        return self.state.get("b") if isinstance(self.state, dict) else None


# ---------------------------------------------------------------------------
# Individual learners
# ---------------------------------------------------------------------------


def _center(X, y, fit_intercept):
    if fit_intercept:
        xm, ym = X.mean(axis=0), float(y.mean())
        return X - xm, y - ym, xm, ym
    return X, y, np.zeros(X.shape[1]), 0.0


def ridge_solve(X: np.ndarray, y: np.ndarray, alpha: float) -> np.ndarray:
    """Solve (X'X + alpha I) w = X'y."""
    d = X.shape[1]
    A = X.T @ X + alpha * np.eye(d)
    if alpha == 0 and np.linalg.matrix_rank(X) < d:
        raise SingularSystem("design matrix is rank deficient")
    try:
        return np.linalg.solve(A, X.T @ y)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc


def _fit_ridge(X, y, hp, seed):
    Xc, yc, xm, ym = _center(X, y, hp["fit_intercept"])
    w = ridge_solve(Xc, yc, float(hp["alpha"]))
    return {"w": w, "b": ym - float(xm @ w)}


def _fit_linear(X, y, hp, seed):
    return _fit_ridge(X, y, {"alpha": 0.0, "fit_intercept": hp["fit_intercept"]}, seed)


def _fit_lasso(X, y, hp, seed):
    """Coordinate descent on (1/2n)||y - Xw - b||^2 + alpha ||w||_1."""
    Xc, yc, xm, ym = _center(X, y, hp["fit_intercept"])
    n, d = Xc.shape
    alpha = float(hp["alpha"])
    col_sq = (Xc**2).sum(axis=0) / n
    w = np.zeros(d)
    r = yc.copy()
    for _ in range(int(hp["max_iter"])):
        max_step = 0.0
        for j in range(d):
            if col_sq[j] == 0:
                continue
            old = w[j]
            rho = Xc[:, j] @ r / n + col_sq[j] * old
            new = np.sign(rho) * max(abs(rho) - alpha, 0.0) / col_sq[j]
            if new != old:
                r -= Xc[:, j] * (new - old)
                w[j] = new
                max_step = max(max_step, abs(new - old))
        if max_step < hp["tol"]:
            break
    return {"w": w, "b": ym - float(xm @ w)}


def _predict_linear(state, X):
    return X @ state["w"] + state["b"]


def _fit_knn(X, y, hp, seed):
    k = int(hp["k"])
    if k > len(X):
        raise InvalidHyperparameter(f"k={k} exceeds training size {len(X)}")
    return {"X": X.copy(), "y": y.copy(), "k": k}


def _predict_knn(state, X):
    Xt, yt, k = state["X"], state["y"], state["k"]
    d2 = (X**2).sum(1)[:, None] - 2 * X @ Xt.T + (Xt**2).sum(1)[None, :]
    d2 = np.maximum(d2, 0.0)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return yt[nearest].mean(axis=1)


def _rbf(A, B, gamma):
    d2 = (A**2).sum(1)[:, None] - 2 * A @ B.T + (B**2).sum(1)[None, :]
    return np.exp(-gamma * np.maximum(d2, 0.0))


def _fit_svr(X, y, hp, seed):
    g = hp["gamma"]
    if g == "auto":
        gamma = 1.0 / X.shape[1]
    elif g == "scale":
        var = X.var()
        gamma = 1.0 / (X.shape[1] * var) if var > 0 else 1.0
    else:
        gamma = float(g)
    ym = float(y.mean())
    K = _rbf(X, X, gamma)
    coef = np.linalg.solve(K + (1.0 / hp["C"]) * np.eye(len(X)), y - ym)
    return {"X": X.copy(), "coef": coef, "gamma": gamma, "b": ym}


def _predict_svr(state, X):
    return _rbf(X, state["X"], state["gamma"]) @ state["coef"] + state["b"]


def _fit_mlp(X, y, hp, seed):
    hp = dict(hp, hidden=tuple(int(h) for h in hp["hidden"]))
    return fit_mlp(X, y, hp, seed)


def _fit_gbt(X, y, hp, seed):
    hp = dict(hp, n_estimators=int(hp["n_estimators"]), max_depth=int(hp["max_depth"]))
    return fit_gbt(X, y, hp, seed)


def _fit_constant(X, y, hp, seed):
    return {"b": float(np.mean(y))}


_FIT = {
    "ridge": _fit_ridge,
    "linear": _fit_linear,
    "lasso": _fit_lasso,
    "knn": _fit_knn,
    "svr": _fit_svr,
    "mlp": _fit_mlp,
    "gbt": _fit_gbt,
    "constant": _fit_constant,
}
_PREDICT = {
    "ridge": _predict_linear,
    "linear": _predict_linear,
    "lasso": _predict_linear,
    "knn": _predict_knn,
    "svr": _predict_svr,
    "mlp": predict_mlp,
    "gbt": predict_gbt,
    "constant": lambda state, X: np.full(len(X), state["b"]),
}


def fit_regressor(spec: RegressorSpec, X, y, seed: int = 0) -> FittedModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise DimensionMismatch(f"X has shape {X.shape} but y has {len(y)} entries")
    if len(y) == 0:
        raise ValueError("cannot fit on zero rows")
    if np.any((y < 0) | (y > 1)):
        raise ValueError("labels must lie in [0, 1]")
    notes = []
    for name in sorted(set(spec.hyperparameters) & IGNORED.get(spec.kind, set())):
        msg = f"{spec.kind}: hyperparameter {name!r} has no effect and is ignored"
        logger.warning(msg)
        notes.append(msg)
    if spec.kind == "svr":
        notes.append("svr is kernel ridge regression with an RBF kernel, not epsilon-SVR")
    state = _FIT[spec.kind](X, y, spec.resolved(), seed)
    return FittedModel(spec, state, X.shape[1], seed, time.time(), notes)


def predict(model: FittedModel, X) -> np.ndarray:
    return np.clip(model.predict_raw(X), 0.0, 1.0)


def save_model(model: FittedModel, path: Union[str, Path], extra: dict | None = None) -> None:
    with open(path, "wb") as fh:
        pickle.dump({"format": MODEL_FORMAT, "version": MODEL_VERSION, "model": model, "extra": extra or {}}, fh)


def load_model(path: Union[str, Path]) -> tuple[FittedModel, dict]:
    with open(path, "rb") as fh:
        blob = pickle.load(fh)
    if not isinstance(blob, dict) or blob.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path} is not a saved model")
    if blob.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model file version {blob.get('version')}")
    return blob["model"], blob.get("extra", {})
