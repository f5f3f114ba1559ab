"""Lottery and choice-task types with exact lottery arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

RENORMALIZE_TOL = 1e-6
SUM_TOL = 1e-9


class LotteryError(ValueError):
    """Base class for invalid lottery input."""


class EmptySupport(LotteryError):
    pass


class NonPositiveProbability(LotteryError):
    pass


class ProbabilitySumOutOfTolerance(LotteryError):
    pass


class NonFinitePayoff(LotteryError):
    pass


class TaskError(ValueError):
    pass


@dataclass(frozen=True)
class Lottery:
    """A discrete payoff distribution.

    ``outcomes`` is a tuple of ``(payoff, probability)`` pairs sorted by payoff,
    with distinct payoffs. Build instances through :func:`make_lottery`.
    """

    outcomes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.outcomes:
            raise EmptySupport("lottery has no outcomes")
        payoffs = [x for x, _ in self.outcomes]
        if len(set(payoffs)) != len(payoffs):
            raise LotteryError("duplicate payoffs in canonical lottery")
        total = math.fsum(p for _, p in self.outcomes)
        if abs(total - 1.0) > SUM_TOL:
            raise ProbabilitySumOutOfTolerance(f"probabilities sum to {total!r}")

    @property
    def payoffs(self) -> np.ndarray:
        return np.array([x for x, _ in self.outcomes], dtype=float)

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.outcomes], dtype=float)

    def __len__(self) -> int:
        return len(self.outcomes)

    def is_degenerate(self) -> bool:
        return len(self.outcomes) == 1


def make_lottery(pairs: Iterable[Sequence[float]]) -> Lottery:
    """Validate ``(payoff, probability)`` pairs and return a canonical Lottery.

    Duplicate payoffs are merged by summing their probabilities. A total
    probability within 1e-6 of one is renormalized (when it is off by more
    than 1e-9, so canonical input passes through unchanged); anything further
    off is rejected.
    """
    merged: dict[float, float] = {}
    n = 0
    for payoff, prob in pairs:
        n += 1
        payoff = float(payoff)
        prob = float(prob)
        if not math.isfinite(payoff):
            raise NonFinitePayoff(f"payoff {payoff!r} is not finite")
        if not math.isfinite(prob) or prob <= 0.0:
            raise NonPositiveProbability(f"probability {prob!r} for payoff {payoff!r}")
        merged[payoff] = merged.get(payoff, 0.0) + prob
    if n == 0:
        raise EmptySupport("lottery needs at least one outcome")
    total = math.fsum(merged.values())
    if abs(total - 1.0) > RENORMALIZE_TOL:
        raise ProbabilitySumOutOfTolerance(
            f"probabilities sum to {total:.9g}, expected 1 (tolerance {RENORMALIZE_TOL})"
        )
    if abs(total - 1.0) > SUM_TOL:
        merged = {x: p / total for x, p in merged.items()}
    return Lottery(tuple(sorted(merged.items())))


def sure_thing(payoff: float) -> Lottery:
    return make_lottery([(payoff, 1.0)])


def expected_value(lot: Lottery) -> float:
    ev = math.fsum(x * p for x, p in lot.outcomes)
    # probabilities may sum to 1 +- 1e-9; keep the result inside the support
    return min(max(ev, lot.outcomes[0][0]), lot.outcomes[-1][0])


def variance(lot: Lottery) -> float:
    if lot.is_degenerate():
        return 0.0
    ev = expected_value(lot)
    return math.fsum(p * (x - ev) ** 2 for x, p in lot.outcomes)


def min_payoff(lot: Lottery) -> float:
    return lot.outcomes[0][0]


def max_payoff(lot: Lottery) -> float:
    return lot.outcomes[-1][0]


def sample(lot: Lottery, rng: np.random.Generator, size: Optional[int] = None):
    """Draw payoffs from ``lot`` using the caller's generator.

    Returns a float when ``size`` is None, otherwise an array of draws.
    """
    if lot.is_degenerate():
        value = lot.outcomes[0][0]
        return value if size is None else np.full(size, value)
    cdf = np.cumsum(lot.probs)
    cdf[-1] = 1.0
    u = rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    draws = lot.payoffs[idx]
    return float(draws) if size is None else draws


def uniformized(lot: Lottery) -> Lottery:
    """Same support with every outcome equally likely."""
    n = len(lot)
    return Lottery(tuple((x, 1.0 / n) for x, _ in lot.outcomes)) if n > 1 else lot


def format_lottery(lot: Lottery) -> str:
    """Render in the ``payoff:prob;payoff:prob`` dataset grammar."""
    return ";".join(f"{_fmt(x)}:{_fmt(p)}" for x, p in lot.outcomes)


def parse_lottery(text: str) -> Lottery:
    pairs = []
    for chunk in text.strip().split(";"):
        payoff, sep, prob = chunk.partition(":")
        if not sep:
            raise LotteryError(f"outcome {chunk!r} is not payoff:prob")
        try:
            pairs.append((float(payoff), float(prob)))
        except ValueError as exc:
            raise LotteryError(f"outcome {chunk!r}: {exc}") from None
    return make_lottery(pairs)


def _fmt(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


@dataclass(frozen=True)
class ChoiceTask:
    """One binary choice problem between Option A and Option B."""

    task_id: str
    option_a_text: Optional[str] = None
    option_b_text: Optional[str] = None
    option_a_lottery: Optional[Lottery] = None
    option_b_lottery: Optional[Lottery] = None
    observed_rate_a: Optional[float] = None
    n_participants: Optional[int] = None

    def __post_init__(self):
        if not self.task_id:
            raise TaskError("task_id must be non-empty")
        texts = (self.option_a_text is None, self.option_b_text is None)
        lots = (self.option_a_lottery is None, self.option_b_lottery is None)
        if texts[0] != texts[1]:
            raise TaskError(f"task {self.task_id}: textual modality half-present")
        if lots[0] != lots[1]:
            raise TaskError(f"task {self.task_id}: numeric modality half-present")
        if texts[0] and lots[0]:
            raise TaskError(f"task {self.task_id}: no modality present")
        if self.observed_rate_a is not None and not 0.0 <= self.observed_rate_a <= 1.0:
            raise TaskError(f"task {self.task_id}: rate {self.observed_rate_a} outside [0, 1]")
        if self.n_participants is not None and self.n_participants < 0:
            raise TaskError(f"task {self.task_id}: negative participant count")

    @property
    def has_text(self) -> bool:
        return self.option_a_text is not None

    @property
    def has_numeric(self) -> bool:
        return self.option_a_lottery is not None
