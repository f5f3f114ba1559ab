import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskychoice.core import (
    ChoiceTask,
    EmptySupport,
    Lottery,
    LotteryError,
    NonFinitePayoff,
    NonPositiveProbability,
    ProbabilitySumOutOfTolerance,
    TaskError,
    expected_value,
    format_lottery,
    make_lottery,
    max_payoff,
    min_payoff,
    parse_lottery,
    sample,
    uniformized,
    variance,
)


@st.composite
def lotteries(draw, max_size=5):
    # payoffs on a 0.01 grid, like the decimal literals datasets carry
    cents = draw(st.lists(st.integers(-1_000_000, 1_000_000), min_size=1, max_size=max_size, unique=True))
    payoffs = [c / 100 for c in cents]
    weights = draw(st.lists(st.floats(0.01, 1.0), min_size=len(payoffs), max_size=len(payoffs)))
    total = math.fsum(weights)
    return make_lottery([(x, w / total) for x, w in zip(payoffs, weights)])


class TestMakeLottery:
    def test_sure_thing(self):
        lot = make_lottery([(1, 1.0)])
        assert lot.outcomes == ((1.0, 1.0),)
        assert lot.is_degenerate()

    def test_two_outcomes_sorted(self):
        lot = make_lottery([(5, 0.23), (2, 0.77)])
        assert lot.outcomes == ((2.0, 0.77), (5.0, 0.23))
        assert len(lot) == 2

    def test_duplicates_merge(self):
        assert make_lottery([(3, 0.5), (3, 0.5)]).outcomes == ((3.0, 1.0),)

    def test_small_drift_is_renormalized(self):
        lot = make_lottery([(0, 0.5), (1, 0.5 + 5e-7)])
        assert abs(math.fsum(lot.probs) - 1.0) <= 1e-12

    @pytest.mark.parametrize(
        "pairs, exc",
        [
            ([], EmptySupport),
            ([(1, 0.0), (2, 1.0)], NonPositiveProbability),
            ([(1, -0.1), (2, 1.1)], NonPositiveProbability),
            ([(1, 0.5), (2, 0.4)], ProbabilitySumOutOfTolerance),
            ([(float("inf"), 1.0)], NonFinitePayoff),
            ([(float("nan"), 1.0)], NonFinitePayoff),
        ],
    )
    def test_rejects(self, pairs, exc):
        with pytest.raises(exc):
            make_lottery(pairs)

    def test_direct_construction_checks_sum(self):
        with pytest.raises(LotteryError):
            Lottery(((1.0, 0.5),))

    @given(lotteries())
    def test_idempotent(self, lot):
        assert make_lottery(lot.outcomes) == lot


class TestMoments:
    @pytest.mark.parametrize(
        "pairs, ev",
        [([(1, 1.0)], 1.0), ([(5, 0.23), (2, 0.77)], 2.69), ([(-5, 0.5), (5, 0.5)], 0.0)],
    )
    def test_expected_value(self, pairs, ev):
        assert expected_value(make_lottery(pairs)) == pytest.approx(ev, abs=1e-12)

    @pytest.mark.parametrize(
        "pairs, var",
        [([(1, 1.0)], 0.0), ([(5, 0.23), (2, 0.77)], 0.23 * 0.77 * 9), ([(-1, 0.5), (1, 0.5)], 1.0)],
    )
    def test_variance(self, pairs, var):
        assert variance(make_lottery(pairs)) == pytest.approx(var, abs=1e-12)

    def test_variance_value(self):
        # 0.23 * 0.77 * 3**2
        assert variance(make_lottery([(5, 0.23), (2, 0.77)])) == pytest.approx(1.5939, abs=1e-9)

    @pytest.mark.parametrize(
        "pairs, lo, hi",
        [([(5, 0.23), (2, 0.77)], 2, 5), ([(1, 1.0)], 1, 1), ([(-3, 0.1), (0, 0.9)], -3, 0)],
    )
    def test_extremes(self, pairs, lo, hi):
        lot = make_lottery(pairs)
        assert (min_payoff(lot), max_payoff(lot)) == (lo, hi)

    @given(lotteries())
    def test_ev_within_support(self, lot):
        assert min_payoff(lot) <= expected_value(lot) <= max_payoff(lot)

    @given(lotteries())
    def test_zero_variance_iff_degenerate(self, lot):
        assert (variance(lot) == 0.0) == lot.is_degenerate()
        assert variance(lot) >= 0.0


class TestSample:
    def test_degenerate(self):
        lot = make_lottery([(7, 1.0)])
        for seed in range(5):
            assert sample(lot, np.random.default_rng(seed)) == 7

    def test_law_of_large_numbers(self):
        lot = make_lottery([(0, 0.5), (1, 0.5)])
        draws = sample(lot, np.random.default_rng(42), size=100_000)
        assert abs(draws.mean() - 0.5) <= 0.01

    def test_frequencies_converge(self):
        lot = make_lottery([(-2, 0.1), (0, 0.3), (4, 0.6)])
        draws = sample(lot, np.random.default_rng(1), size=200_000)
        for x, p in lot.outcomes:
            assert abs(np.mean(draws == x) - p) < 0.005

    @given(lotteries(), st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_reproducible_and_in_support(self, lot, seed):
        a = sample(lot, np.random.default_rng(seed), size=64)
        b = sample(lot, np.random.default_rng(seed), size=64)
        assert np.array_equal(a, b)
        assert set(np.unique(a)) <= set(lot.payoffs)

    def test_uniformized(self):
        lot = uniformized(make_lottery([(10, 0.1), (0, 0.9)]))
        assert lot.outcomes == ((0.0, 0.5), (10.0, 0.5))


class TestLotteryText:
    @given(lotteries())
    def test_round_trip(self, lot):
        assert parse_lottery(format_lottery(lot)) == lot

    def test_grammar(self):
        assert parse_lottery("5:0.23;2:0.77") == make_lottery([(5, 0.23), (2, 0.77)])
        assert format_lottery(make_lottery([(1, 1.0)])) == "1:1"

    @pytest.mark.parametrize("text", ["", "5", "5:x", "a:0.5;1:0.5", "1:0.5;2:0.4"])
    def test_malformed(self, text):
        with pytest.raises(LotteryError):
            parse_lottery(text)


class TestChoiceTask:
    def test_textual(self):
        t = ChoiceTask("t1", option_a_text="a", option_b_text="b", observed_rate_a=0.4)
        assert t.has_text and not t.has_numeric

    def test_both(self):
        lot = make_lottery([(1, 1.0)])
        t = ChoiceTask("t1", "a", "b", lot, lot)
        assert t.has_text and t.has_numeric

    @pytest.mark.parametrize(
        "kwargs",
        [
            {},
            {"option_a_text": "a"},
            {"option_b_lottery": make_lottery([(1, 1.0)])},
            {"option_a_text": "a", "option_b_text": "b", "observed_rate_a": 1.2},
            {"option_a_text": "a", "option_b_text": "b", "n_participants": -1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(TaskError):
            ChoiceTask("t1", **kwargs)

    def test_empty_id(self):
        with pytest.raises(TaskError):
            ChoiceTask("", option_a_text="a", option_b_text="b")
