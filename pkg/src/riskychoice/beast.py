"""Monte Carlo simulation of mental-sampling choice and synthetic task generation.

Each simulated agent blends a noisy expected-value estimate with the mean of a
few mental samples. A mental sample is produced by one of four sampling tools
(unbiased, uniform, pessimism, sign), and the same tool is used for both
options within one sample.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .core import ChoiceTask, Lottery, expected_value, make_lottery

TOOLS = ("unbiased", "uniform", "pessimism", "sign")


@dataclass(frozen=True)
class BeastParams:
    n_agents: int = 4000
    kappa_max: int = 3
    ev_error_sigma: float = 0.35
    tool_weights: tuple[float, float, float, float] = (0.4, 0.25, 0.15, 0.2)
    sample_weight_range: tuple[float, float] = (0.3, 1.0)

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("n_agents must be positive")
        if self.kappa_max < 1:
            raise ValueError("kappa_max must be positive")
        if self.ev_error_sigma < 0:
            raise ValueError("ev_error_sigma must be non-negative")
        if len(self.tool_weights) != len(TOOLS) or min(self.tool_weights) < 0:
            raise ValueError("tool_weights needs four non-negative entries")
        if abs(math.fsum(self.tool_weights) - 1.0) > 1e-9:
            raise ValueError("tool_weights must sum to 1")
        lo, hi = self.sample_weight_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError("sample_weight_range must be an interval within [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BeastParams":
        d = dict(d)
        for key in ("tool_weights", "sample_weight_range"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass(frozen=True)
class SyntheticSpace:
    payoff_range: tuple[float, float] = (-10.0, 30.0)
    max_support_size: int = 3
    probability_step: float = 0.01
    sure_thing_rate: float = 0.4

    def __post_init__(self):
        lo, hi = self.payoff_range
        if not lo < hi:
            raise ValueError("payoff_range must be non-degenerate")
        if self.max_support_size < 1:
            raise ValueError("max_support_size must be at least 1")
        if not 0 < self.probability_step <= 1:
            raise ValueError("probability_step must lie in (0, 1]")
        if abs(self.grid_size * self.probability_step - 1.0) > 1e-9:
            raise ValueError("probability_step must divide 1")
        if not 0.0 <= self.sure_thing_rate <= 1.0:
            raise ValueError("sure_thing_rate must lie in [0, 1]")
        if self.payoff_grid().size < self.max_support_size:
            raise ValueError("payoff_range holds fewer integer payoffs than max_support_size")
        if self.grid_size < self.max_support_size:
            raise ValueError("probability grid is too coarse for max_support_size")

    @property
    def grid_size(self) -> int:
        """Number of probability quanta summing to one."""
        return int(round(1.0 / self.probability_step))

    def payoff_grid(self) -> np.ndarray:
        lo, hi = self.payoff_range
        return np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=float)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpace":
        d = dict(d)
        if "payoff_range" in d:
            d["payoff_range"] = tuple(d["payoff_range"])
        return cls(**d)


def _mental_samples(lot: Lottery, tools: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One mental sample per entry of ``tools`` (an integer array of tool codes)."""
    payoffs = lot.payoffs
    cdf = np.cumsum(lot.probs)
    cdf[-1] = 1.0
    n = len(payoffs)
    u_draw = rng.random(tools.shape)
    u_unif = rng.random(tools.shape)
    drawn = payoffs[np.searchsorted(cdf, u_draw, side="right")]
    flat = payoffs[np.minimum((u_unif * n).astype(np.int64), n - 1)]
    scale = float(np.mean(np.abs(payoffs)))
    out = np.select(
        [tools == 0, tools == 1, tools == 2],
        [drawn, flat, np.full(tools.shape, payoffs[0])],
        default=np.sign(drawn) * scale,
    )
    return out


def simulate_values(
    a: Lottery, b: Lottery, params: BeastParams, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Subjective values of A and B for every simulated agent."""
    n = params.n_agents
    lo, hi = params.sample_weight_range
    w = rng.uniform(lo, hi, n)
    kappa = rng.integers(1, params.kappa_max + 1, n)
    tools = rng.choice(len(TOOLS), size=(n, params.kappa_max), p=np.asarray(params.tool_weights))
    used = np.arange(params.kappa_max)[None, :] < kappa[:, None]

    values = []
    for lot in (a, b):
        eps = rng.normal(0.0, params.ev_error_sigma, n) if params.ev_error_sigma > 0 else 0.0
        samples = _mental_samples(lot, tools, rng)
        sample_mean = np.where(used, samples, 0.0).sum(axis=1) / kappa
        values.append((1.0 - w) * (expected_value(lot) + eps) + w * sample_mean)
    return values[0], values[1]


def beast_choice_rate(a: Lottery, b: Lottery, params: Optional[BeastParams] = None, seed: int = 0) -> float:
    """Fraction of simulated agents choosing A; exact ties are settled by a fair coin."""
    params = params or BeastParams()
    rng = np.random.default_rng(seed)
    va, vb = simulate_values(a, b, params, rng)
    coin = rng.random(params.n_agents) < 0.5
    chose_a = (va > vb) | ((va == vb) & coin)
    return float(chose_a.mean())


def _random_lottery(space: SyntheticSpace, rng: np.random.Generator, size: int) -> Lottery:
    payoffs = rng.choice(space.payoff_grid(), size=size, replace=False)
    if size == 1:
        return make_lottery([(payoffs[0], 1.0)])
    cuts = np.sort(rng.choice(np.arange(1, space.grid_size), size=size - 1, replace=False))
    quanta = np.diff(np.concatenate([[0], cuts, [space.grid_size]]))
    probs = [round(q * space.probability_step, 10) for q in quanta]
    return make_lottery(zip(payoffs.tolist(), probs))


def generate_synthetic_pair(space: SyntheticSpace, rng: np.random.Generator) -> tuple[Lottery, Lottery]:
    if rng.random() < space.sure_thing_rate:
        a = _random_lottery(space, rng, 1)
    else:
        size = int(rng.integers(2, space.max_support_size + 1)) if space.max_support_size > 1 else 1
        a = _random_lottery(space, rng, size)
    b = _random_lottery(space, rng, int(rng.integers(1, space.max_support_size + 1)))
    return a, b


def generate_synthetic_task(space: SyntheticSpace, rng: np.random.Generator, task_id: str = "syn-0") -> ChoiceTask:
    """A numeric-only task drawn from ``space``.

    With probability ``sure_thing_rate`` Option A is a sure thing; otherwise it
    has between two and ``max_support_size`` outcomes. Option B has between one
    and ``max_support_size`` outcomes. Payoffs are distinct integers in the
    payoff range and probabilities lie on the configured grid.
    """
    a, b = generate_synthetic_pair(space, rng)
    return ChoiceTask(task_id=task_id, option_a_lottery=a, option_b_lottery=b)


def task_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, index]))


def task_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, index, 1]).generate_state(1)[0])


def generate_synthetic_dataset(
    n: int,
    space: Optional[SyntheticSpace] = None,
    params: Optional[BeastParams] = None,
    seed: int = 0,
    *,
    workers: int = 1,
    id_prefix: str = "syn",
    pair_factory: Optional[Callable[[SyntheticSpace, np.random.Generator], tuple[Lottery, Lottery]]] = None,
) -> list[ChoiceTask]:
    """``n`` synthetic tasks labeled with their simulated choice rate.

    The generator state for task ``i`` depends only on ``(seed, i)`` so the
    output is identical for any worker count. ``pair_factory`` replaces the
    lottery-pair generator, e.g. to inject fixed pairs in tests.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    space = space or SyntheticSpace()
    params = params or BeastParams()
    width = len(str(n - 1))

    def one(i: int) -> ChoiceTask:
        a, b = (pair_factory or generate_synthetic_pair)(space, task_rng(seed, i))
        rate = beast_choice_rate(a, b, params, task_seed(seed, i))
        return ChoiceTask(
            task_id=f"{id_prefix}-{i:0{width}d}",
            option_a_lottery=a,
            option_b_lottery=b,
            observed_rate_a=rate,
            n_participants=params.n_agents,
        )

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, range(n)))
    return [one(i) for i in range(n)]
