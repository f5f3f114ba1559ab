import numpy as np
import pytest

from riskychoice.beast import SyntheticSpace, generate_synthetic_pair
from riskychoice.core import ChoiceTask, Lottery, make_lottery, min_payoff

# a sure 1 against 5 with probability 0.23, otherwise 2; B dominates
SURE_ONE = make_lottery([(1, 1.0)])
GAMBLE_52 = make_lottery([(5, 0.23), (2, 0.77)])


def random_pairs(n: int, seed: int = 0, space: SyntheticSpace | None = None) -> list[tuple[Lottery, Lottery]]:
    space = space or SyntheticSpace()
    rng = np.random.default_rng(seed)
    return [generate_synthetic_pair(space, rng) for _ in range(n)]


def dominated_pairs(n: int, seed: int):
    """(dominant, dominated) pairs with min(dominant) >= max(dominated), never equal constants."""
    space = SyntheticSpace()
    rng = np.random.default_rng(seed)
    grid = space.payoff_grid()
    out = []
    while len(out) < n:
        top = random_pairs(1, int(rng.integers(2**31)))[0][0]
        below = grid[grid <= min_payoff(top)]
        size = int(rng.integers(1, min(3, len(below)) + 1))
        xs = rng.choice(below, size=size, replace=False)
        ws = rng.dirichlet(np.ones(size))
        low = make_lottery(zip(xs, ws))
        if low == top:
            continue
        out.append((top, low))
    return out


def describe(lot: Lottery) -> str:
    """Plain-English rendering of a lottery, used to build textual fixtures."""
    if lot.is_degenerate():
        return f"Get {lot.payoffs[0]:g} for sure"
    parts = [f"{x:g} with probability {p:g}" for x, p in lot.outcomes]
    return "Get " + ", ".join(parts[:-1]) + f", otherwise {lot.outcomes[-1][0]:g}"


def textual_copy(task: ChoiceTask) -> ChoiceTask:
    return ChoiceTask(
        task_id=task.task_id,
        option_a_text=describe(task.option_a_lottery),
        option_b_text=describe(task.option_b_lottery),
        option_a_lottery=task.option_a_lottery,
        option_b_lottery=task.option_b_lottery,
        observed_rate_a=task.observed_rate_a,
        n_participants=task.n_participants,
    )


@pytest.fixture
def pairs_200():
    return random_pairs(200, seed=11)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid and getattr(rep, "when", "call") == "call":
                rows.append((nodeid.split("::")[-1], outcome))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(rows):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
