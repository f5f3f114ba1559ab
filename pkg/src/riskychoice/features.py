"""Seven behavioral comparison features between Option A and Option B.

Every score is oriented toward A: +1 means the feature fully favors A (for
``risk``, +1 means A is the riskier option). Numeric features are exact;
textual features are obtained by asking an LLM and averaging its answers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import TYPE_CHECKING, Optional

import numpy as np

from .core import ChoiceTask, Lottery, expected_value, max_payoff, min_payoff, variance

if TYPE_CHECKING:
    from .llm.client import LLMClient

FEATURE_NAMES = ("unbiased", "sign", "uniform", "better_on_avg", "dominance", "worst_case", "risk")


@dataclass(frozen=True)
class FeatureVector:
    unbiased: float
    sign: float
    uniform: float
    better_on_avg: float
    dominance: float
    worst_case: float
    risk: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{f.name}={v} outside [-1, 1]")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def __neg__(self) -> "FeatureVector":
        return FeatureVector(*(-v + 0.0 for v in astuple(self)))


def _signum(x: float) -> int:
    return (x > 0) - (x < 0)


def _advantage(xs: np.ndarray, ps: np.ndarray, ys: np.ndarray, qs: np.ndarray) -> float:
    # fsum is correctly rounded, so the result is independent of summation
    # order and f(a, b) == -f(b, a) holds exactly.
    joint = ps[:, None] * qs[None, :]
    gt = math.fsum(joint[xs[:, None] > ys[None, :]].tolist())
    lt = math.fsum(joint[xs[:, None] < ys[None, :]].tolist())
    return min(1.0, max(-1.0, gt - lt))


def unbiased_advantage(a: Lottery, b: Lottery) -> float:
    """P(X > Y) - P(Y > X) for independent draws X from a and Y from b."""
    return _advantage(a.payoffs, a.probs, b.payoffs, b.probs)


def sign_advantage(a: Lottery, b: Lottery) -> float:
    return _advantage(np.sign(a.payoffs), a.probs, np.sign(b.payoffs), b.probs)


def uniform_advantage(a: Lottery, b: Lottery) -> float:
    pa = np.full(len(a), 1.0 / len(a))
    pb = np.full(len(b), 1.0 / len(b))
    return _advantage(a.payoffs, pa, b.payoffs, pb)


def better_on_avg(a: Lottery, b: Lottery) -> int:
    return _signum(expected_value(a) - expected_value(b))


def dominance(a: Lottery, b: Lottery) -> int:
    """+1 when every payoff of ``a`` is at least every payoff of ``b``.

    Two sure things paying the same amount count as 0.
    """
    a_wins = min_payoff(a) >= max_payoff(b)
    b_wins = min_payoff(b) >= max_payoff(a)
    if a_wins and b_wins:
        return 0
    return int(a_wins) - int(b_wins)


def worst_case(a: Lottery, b: Lottery) -> int:
    return _signum(min_payoff(a) - min_payoff(b))


def risk_comparison(a: Lottery, b: Lottery) -> int:
    return _signum(variance(a) - variance(b))


NUMERIC_FEATURES = {
    "unbiased": unbiased_advantage,
    "sign": sign_advantage,
    "uniform": uniform_advantage,
    "better_on_avg": better_on_avg,
    "dominance": dominance,
    "worst_case": worst_case,
    "risk": risk_comparison,
}


def numeric_feature_vector(a: Lottery, b: Lottery) -> FeatureVector:
    return FeatureVector(*(float(NUMERIC_FEATURES[name](a, b)) for name in FEATURE_NAMES))


def task_feature_vector(task: ChoiceTask) -> FeatureVector:
    if not task.has_numeric:
        raise ValueError(f"task {task.task_id} has no numeric lotteries")
    return numeric_feature_vector(task.option_a_lottery, task.option_b_lottery)


def feature_matrix(tasks) -> np.ndarray:
    return np.vstack([task_feature_vector(t).as_array() for t in tasks]) if tasks else np.empty((0, 7))


@dataclass
class TextualFeatureResult:
    vector: FeatureVector
    answers: dict[str, list[int]]
    flagged: dict[str, int]


def textual_feature_vector(
    task: ChoiceTask,
    client: "LLMClient",
    calls_per_feature: int = 3,
    *,
    parallelism: Optional[int] = None,
    seed: int = 0,
    detail: bool = False,
):
    """Ask the LLM each feature prompt ``calls_per_feature`` times and average.

    Each call carries its own seed so repeated calls are distinct cache
    entries. Answers that stay unparsable after one re-ask count as neutral
    and are tallied in ``flagged``.
    """
    from .llm.prompts import render_feature_prompt
    from .llm.parsing import resolve_feature_answer

    if not task.has_text:
        raise ValueError(f"task {task.task_id} has no option texts")
    if calls_per_feature < 1:
        raise ValueError("calls_per_feature must be at least 1")

    jobs = [(name, j) for name in FEATURE_NAMES for j in range(calls_per_feature)]

    def run(job):
        name, j = job
        prompt = render_feature_prompt(name, task)
        return resolve_feature_answer(client, prompt, seed=seed * 1_000_003 + j)

    workers = parallelism or client.parallelism
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    answers: dict[str, list[int]] = {name: [] for name in FEATURE_NAMES}
    flagged = {name: 0 for name in FEATURE_NAMES}
    for (name, _), (value, was_flagged) in zip(jobs, results):
        answers[name].append(value)
        flagged[name] += int(was_flagged)
    vector = FeatureVector(*(float(np.mean(answers[name])) for name in FEATURE_NAMES))
    if detail:
        return TextualFeatureResult(vector, answers, flagged)
    return vector
