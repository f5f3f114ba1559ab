"""Small ReLU multilayer perceptron trained with Adam on squared error."""

from __future__ import annotations

import numpy as np


def _init(rng: np.random.Generator, sizes: list[int]):
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        layers.append([rng.uniform(-bound, bound, (fan_in, fan_out)), rng.uniform(-bound, bound, fan_out)])
    return layers


def _forward(layers, X, dropout, rng):
    acts, masks = [X], []
    h = X
    for i, (W, b) in enumerate(layers):
        z = h @ W + b
        if i == len(layers) - 1:
            return z[:, 0], acts, masks
        h = np.maximum(z, 0.0)
        if rng is not None and dropout > 0:
            keep = (rng.random(h.shape) >= dropout) / (1.0 - dropout)
            h = h * keep
            masks.append(keep)
        else:
            masks.append(None)
        acts.append(h)


def loss_and_grads(layers, X, y, weight_decay=0.0, dropout=0.0, rng=None):
    """Mean squared error plus (weight_decay / 2) * sum of squared parameters, and its gradients.

    Dropout masks are drawn from ``rng`` when it is given.
    """
    out, acts, masks = _forward(layers, X, dropout, rng)
    err = out - y
    loss = float(np.mean(err**2)) + 0.5 * weight_decay * sum(float((W**2).sum() + (b**2).sum()) for W, b in layers)
    delta = (2.0 / len(y)) * err[:, None]
    grads = [None] * len(layers)
    for i in range(len(layers) - 1, -1, -1):
        W, b = layers[i]
        grads[i] = [acts[i].T @ delta + weight_decay * W, delta.sum(axis=0) + weight_decay * b]
        if i > 0:
            delta = delta @ W.T
            if masks[i - 1] is not None:
                delta = delta * masks[i - 1]
            delta = delta * (acts[i] > 0)
    return loss, grads


def fit_mlp(X: np.ndarray, y: np.ndarray, params: dict, seed: int) -> dict:
    """Mini-batch Adam; weight decay is added to the gradient as an L2 term."""
    rng = np.random.default_rng(seed)
    n, d = X.shape
    if params["standardize"]:
        mu, sd = X.mean(axis=0), X.std(axis=0)
        sd = np.where(sd > 0, sd, 1.0)
    else:
        mu, sd = np.zeros(d), np.ones(d)
    Xs = (X - mu) / sd
    layers = _init(rng, [d, *params["hidden"], 1])
    lr, wd, p = params["learning_rate"], params["weight_decay"], params["dropout"]
    b1, b2, eps = 0.9, 0.999, 1e-8
    m = [[np.zeros_like(W), np.zeros_like(b)] for W, b in layers]
    v = [[np.zeros_like(W), np.zeros_like(b)] for W, b in layers]
    t = 0
    bs = params["batch_size"]
    for _ in range(params["epochs"]):
        order = rng.permutation(n)
        for start in range(0, n, bs):
            idx = order[start : start + bs]
            _, grads = loss_and_grads(layers, Xs[idx], y[idx], wd, p, rng)
            t += 1
            for i, (gW, gb) in enumerate(grads):
                for j, g in enumerate((gW, gb)):
                    m[i][j] = b1 * m[i][j] + (1 - b1) * g
                    v[i][j] = b2 * v[i][j] + (1 - b2) * g * g
                    mhat = m[i][j] / (1 - b1**t)
                    vhat = v[i][j] / (1 - b2**t)
                    layers[i][j] = layers[i][j] - lr * mhat / (np.sqrt(vhat) + eps)
    return {"layers": layers, "mu": mu, "sd": sd}


def predict_mlp(state: dict, X: np.ndarray) -> np.ndarray:
    out, _, _ = _forward(state["layers"], (X - state["mu"]) / state["sd"], 0.0, None)
    return out
