"""Least-squares gradient-boosted regression trees.

Splits use the regularized second-order gain; for squared error the hessian
is one per row, so ``min_child_weight`` is a minimum leaf row count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return self.value[node]
            rows = np.nonzero(inner)[0]
            go_left = X[rows, f[rows]] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])


def _soft(g: np.ndarray | float, alpha: float):
    if alpha == 0:
        return g
    return np.sign(g) * np.maximum(np.abs(g) - alpha, 0.0)


class _Builder:
    def __init__(self, X, grad, params, level_cols):
        self.X = X
        self.grad = grad
        self.p = params
        self.level_cols = level_cols
        self.feature, self.threshold, self.left, self.right, self.value = [], [], [], [], []

    def leaf_value(self, G: float, H: float) -> float:
        w = -float(_soft(G, self.p["reg_alpha"])) / (H + self.p["reg_lambda"])
        mds = self.p["max_delta_step"]
        if mds > 0:
            w = float(np.clip(w, -mds, mds))
        return w

    def score(self, G, H):
        return _soft(G, self.p["reg_alpha"]) ** 2 / (H + self.p["reg_lambda"])

    def new_node(self) -> int:
        for lst, v in ((self.feature, -1), (self.threshold, 0.0), (self.left, -1), (self.right, -1), (self.value, 0.0)):
            lst.append(v)
        return len(self.feature) - 1

    def best_split(self, rows: np.ndarray, depth: int):
        g = self.grad[rows]
        G, H = g.sum(), float(len(rows))
        mcw = self.p["min_child_weight"]
        parent = self.score(G, H)
        best = (0.0, -1, 0.0)
        for col in self.level_cols[depth]:
            x = self.X[rows, col]
            order = np.argsort(x, kind="stable")
            xs, gs = x[order], g[order]
            GL = np.cumsum(gs)[:-1]
            HL = np.arange(1, len(rows), dtype=float)
            HR = H - HL
            ok = (xs[1:] > xs[:-1]) & (HL >= mcw) & (HR >= mcw)
            if not ok.any():
                continue
            gain = 0.5 * (self.score(GL, HL) + self.score(G - GL, HR) - parent) - self.p["gamma"]
            gain = np.where(ok, gain, -np.inf)
            i = int(np.argmax(gain))
            if gain[i] > best[0]:
                best = (float(gain[i]), int(col), 0.5 * (xs[i] + xs[i + 1]))
        return G, H, best

    def build(self, rows: np.ndarray, depth: int) -> int:
        node = self.new_node()
        G, H, (gain, col, thr) = (
            self.best_split(rows, depth)
            if depth < self.p["max_depth"]
            else (self.grad[rows].sum(), float(len(rows)), (0.0, -1, 0.0))
        )
        if col < 0:
            self.value[node] = self.leaf_value(G, H)
            return node
        mask = self.X[rows, col] <= thr
        self.feature[node] = col
        self.threshold[node] = thr
        self.left[node] = self.build(rows[mask], depth + 1)
        self.right[node] = self.build(rows[~mask], depth + 1)
        return node

    def tree(self) -> Tree:
        return Tree(
            np.array(self.feature, dtype=np.int64),
            np.array(self.threshold, dtype=float),
            np.array(self.left, dtype=np.int64),
            np.array(self.right, dtype=np.int64),
            np.array(self.value, dtype=float),
        )


def _n_cols(frac: float, n: int) -> int:
    return max(1, int(np.floor(frac * n)))


def fit_gbt(X: np.ndarray, y: np.ndarray, params: dict, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    n, d = X.shape
    base = float(np.mean(y))
    F = np.full(n, base)
    trees = []
    for _ in range(params["n_estimators"]):
        grad = F - y
        n_sub = max(1, int(round(params["subsample"] * n)))
        rows = np.sort(rng.choice(n, size=n_sub, replace=False)) if n_sub < n else np.arange(n)
        tree_cols = np.sort(rng.choice(d, size=_n_cols(params["colsample_bytree"], d), replace=False))
        level_cols = [
            np.sort(rng.choice(tree_cols, size=_n_cols(params["colsample_bylevel"], len(tree_cols)), replace=False))
            for _ in range(params["max_depth"] + 1)
        ]
        builder = _Builder(X, grad, params, level_cols)
        builder.build(rows, 0)
        tree = builder.tree()
        F += params["learning_rate"] * tree.predict(X)
        trees.append(tree)
    return {"base": base, "trees": trees, "learning_rate": params["learning_rate"]}


def predict_gbt(state: dict, X: np.ndarray) -> np.ndarray:
    out = np.full(len(X), state["base"])
    for tree in state["trees"]:
        out += state["learning_rate"] * tree.predict(X)
    return out
