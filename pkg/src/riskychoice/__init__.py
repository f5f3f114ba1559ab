"""Predicting choice rates in binary risky-choice tasks from numeric or textual descriptions."""

from .core import ChoiceTask, Lottery, expected_value, make_lottery, max_payoff, min_payoff, sample, variance

__version__ = "0.1.0"

__all__ = [
    "ChoiceTask",
    "Lottery",
    "expected_value",
    "make_lottery",
    "max_payoff",
    "min_payoff",
    "sample",
    "variance",
]
