import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GAMBLE_52, SURE_ONE, random_pairs
from riskychoice.core import ChoiceTask, make_lottery
from riskychoice.features import (
    FEATURE_NAMES,
    better_on_avg,
    dominance,
    feature_matrix,
    numeric_feature_vector,
    risk_comparison,
    sign_advantage,
    textual_feature_vector,
    uniform_advantage,
    unbiased_advantage,
    worst_case,
)
from riskychoice.llm.client import LLMClient, MockProvider, ProviderFailure

FUNCS = [unbiased_advantage, sign_advantage, uniform_advantage, better_on_avg, dominance, worst_case, risk_comparison]
L = make_lottery


@st.composite
def lottery(draw):
    xs = draw(st.lists(st.integers(-10, 30), min_size=1, max_size=4, unique=True))
    cuts = sorted(draw(st.lists(st.integers(1, 99), min_size=len(xs) - 1, max_size=len(xs) - 1, unique=True)))
    edges = [0, *cuts, 100]
    return L([(x, (hi - lo) / 100) for x, lo, hi in zip(xs, edges[:-1], edges[1:])])


class TestExamples:
    def test_unbiased(self):
        assert unbiased_advantage(SURE_ONE, GAMBLE_52) == -1.0
        assert unbiased_advantage(GAMBLE_52, GAMBLE_52) == 0.0
        assert unbiased_advantage(L([(10, 0.1), (0, 0.9)]), L([(1, 1.0)])) == pytest.approx(-0.8, abs=1e-12)

    def test_sign(self):
        assert sign_advantage(GAMBLE_52, L([(3, 0.5), (9, 0.5)])) == 0.0
        assert sign_advantage(L([(5, 0.5), (-5, 0.5)]), L([(1, 1.0)])) == pytest.approx(-0.5, abs=1e-12)
        assert sign_advantage(L([(1, 1.0)]), L([(-1, 1.0)])) == 1.0

    def test_uniform(self):
        assert uniform_advantage(L([(10, 0.1), (0, 0.9)]), L([(1, 1.0)])) == pytest.approx(0.0, abs=1e-12)
        assert uniform_advantage(L([(3, 1.0)]), L([(2, 1.0)])) == 1.0
        assert uniform_advantage(L([(2, 1.0)]), L([(2, 1.0)])) == 0.0
        assert uniform_advantage(GAMBLE_52, GAMBLE_52) == 0.0

    def test_better_on_avg(self):
        assert better_on_avg(SURE_ONE, GAMBLE_52) == -1
        assert better_on_avg(GAMBLE_52, GAMBLE_52) == 0
        assert better_on_avg(L([(3, 1.0)]), L([(0, 0.5), (4, 0.5)])) == 1

    def test_dominance(self):
        assert dominance(SURE_ONE, GAMBLE_52) == -1
        assert dominance(L([(2, 1.0)]), L([(2, 1.0)])) == 0
        assert dominance(L([(1, 0.5), (10, 0.5)]), L([(2, 1.0)])) == 0
        # touching supports still dominate
        assert dominance(L([(2, 0.5), (4, 0.5)]), L([(2, 1.0)])) == 1

    def test_worst_case(self):
        assert worst_case(SURE_ONE, GAMBLE_52) == -1
        assert worst_case(L([(1, 0.5), (3, 0.5)]), L([(1, 1.0)])) == 0
        assert worst_case(L([(0, 0.9), (100, 0.1)]), L([(-1, 1.0)])) == 1

    def test_risk(self):
        assert risk_comparison(SURE_ONE, GAMBLE_52) == -1
        assert risk_comparison(L([(-1, 0.5), (1, 0.5)]), L([(4, 0.5), (6, 0.5)])) == 0
        assert risk_comparison(L([(-10, 0.5), (10, 0.5)]), L([(1, 1.0)])) == 1

    def test_vector(self):
        v = numeric_feature_vector(SURE_ONE, GAMBLE_52)
        assert tuple(v.as_array()) == (-1, 0, -1, -1, -1, -1, -1)
        assert not numeric_feature_vector(GAMBLE_52, GAMBLE_52).as_array().any()
        assert FEATURE_NAMES == ("unbiased", "sign", "uniform", "better_on_avg", "dominance", "worst_case", "risk")

    def test_vector_swap(self):
        a, b = L([(-3, 0.2), (8, 0.8)]), L([(1, 0.5), (4, 0.5)])
        assert np.array_equal(numeric_feature_vector(b, a).as_array(), -numeric_feature_vector(a, b).as_array())
        assert (-numeric_feature_vector(a, b)) == numeric_feature_vector(b, a)

    def test_matrix(self):
        tasks = [ChoiceTask(f"t{i}", option_a_lottery=a, option_b_lottery=b) for i, (a, b) in enumerate(random_pairs(5))]
        m = feature_matrix(tasks)
        assert m.shape == (5, 7)
        assert np.array_equal(m[2], numeric_feature_vector(*random_pairs(5)[2]).as_array())


class TestProperties:
    @given(lottery(), lottery())
    def test_antisymmetry_and_range(self, a, b):
        for f in FUNCS:
            assert f(a, b) == -f(b, a)
            assert -1.0 <= f(a, b) <= 1.0
        v = numeric_feature_vector(a, b)
        for name in ("dominance", "worst_case", "better_on_avg", "risk"):
            assert getattr(v, name) in (-1, 0, 1)

    @given(lottery(), lottery())
    def test_dominance_soundness(self, a, b):
        if dominance(a, b) == 1:
            assert unbiased_advantage(a, b) >= 0
            assert worst_case(a, b) >= 0

    @given(lottery())
    def test_self_comparison_is_zero(self, a):
        assert not numeric_feature_vector(a, a).as_array().any()

    def test_exact_matches_enumeration(self):
        # direct double loop over the joint support as an independent oracle
        for a, b in random_pairs(200, seed=4):
            want = sum(p * q * np.sign(x - y) for x, p in a.outcomes for y, q in b.outcomes)
            assert unbiased_advantage(a, b) == pytest.approx(want, abs=1e-12)


def _task():
    return ChoiceTask("t1", option_a_text="Get 1 for sure", option_b_text="Get 5 with probability 0.23, otherwise 2")


class TestTextual:
    def test_always_a(self):
        v = textual_feature_vector(_task(), LLMClient(MockProvider(["Option A"])))
        assert np.array_equal(v.as_array(), np.ones(7))

    def test_always_neutral(self):
        v = textual_feature_vector(_task(), LLMClient(MockProvider(["It is too hard to tell."])))
        assert not v.as_array().any()

    def test_alternating(self):
        alt = lambda req: "Option A" if req.seed % 2 == 0 else "Option B"  # noqa: E731
        v = textual_feature_vector(_task(), LLMClient(MockProvider(alt)), calls_per_feature=2)
        assert not v.as_array().any()

    def test_call_count_and_prompts(self):
        provider = MockProvider(["Option B"])
        v = textual_feature_vector(_task(), LLMClient(provider), calls_per_feature=3)
        assert provider.n_calls == 21
        assert np.array_equal(v.as_array(), -np.ones(7))
        assert all("Get 1 for sure" in r.user_text for r in provider.calls)

    def test_unparsable_counts_neutral_and_flags(self):
        res = textual_feature_vector(_task(), LLMClient(MockProvider(["banana"])), calls_per_feature=1, detail=True)
        assert not res.vector.as_array().any()
        assert all(n == 1 for n in res.flagged.values())

    def test_parallel_matches_serial(self):
        seq = textual_feature_vector(_task(), LLMClient(MockProvider()), calls_per_feature=3)
        par = textual_feature_vector(_task(), LLMClient(MockProvider(), parallelism=4), calls_per_feature=3)
        assert seq == par

    def test_provider_failure_propagates(self):
        client = LLMClient(MockProvider([ProviderFailure("down")]), max_attempts=1)
        with pytest.raises(ProviderFailure):
            textual_feature_vector(_task(), client)

    def test_needs_text(self):
        numeric = ChoiceTask("n", option_a_lottery=SURE_ONE, option_b_lottery=GAMBLE_52)
        with pytest.raises(ValueError):
            textual_feature_vector(numeric, LLMClient(MockProvider()))
        with pytest.raises(ValueError):
            textual_feature_vector(_task(), LLMClient(MockProvider()), calls_per_feature=0)
