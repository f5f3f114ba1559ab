"""Prompt templates for fine-tuning export, simulated subjects and feature extraction."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from ..core import ChoiceTask

CONDITIONS = ("binary", "percentage", "confidence")


class MissingText(ValueError):
    pass


@dataclass(frozen=True)
class Personality:
    name: str
    description: str
    role: str = ""
    element: str = ""

    def instruction(self) -> str:
        role = self.role or self.name
        article = "an" if role[:1].lower() in "aeiou" else "a"
        return f"Behave like {article} {role}: {self.description}"


def load_personalities(path: Optional[str] = None) -> list[Personality]:
    """The ten shipped personalities, or a catalog from ``path`` in the same JSON layout."""
    if path is None:
        raw = resources.files("riskychoice.llm").joinpath("data/personalities.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    entries = json.loads(raw)["personalities"]
    catalog = [Personality(**e) for e in entries]
    names = [p.name for p in catalog]
    if len(set(names)) != len(names) or "baseline" in names:
        raise ValueError("personality names must be unique and must not be 'baseline'")
    return catalog


FINETUNE_TEMPLATE = (
    "Estimate the percentage of the population choosing Option A over Option B:\n"
    "Option A: {A}\n"
    "Option B: {B}"
)

_FEATURE_HEAD = "Given two options:\nOption A: {A}\nOption B: {B}\n"
_FEATURE_TAIL = (
    "If it is too hard to tell, say so.\n"
    "Take your time, analyze, think it thoroughly, and then only provide a final answer without explanations."
)
_SIMULATE = "Let's say I simulate these options several times. "

FEATURE_PROMPTS = {
    "unbiased": _FEATURE_HEAD + _SIMULATE + (
        "In each round, I draw one outcome from each option and check which option provided the better "
        "(higher) payoff, if any. Can you assess which option yields more rounds with a strictly better payoff? "
    ) + _FEATURE_TAIL,
    "sign": _FEATURE_HEAD + _SIMULATE + (
        "In each round, I draw one outcome from each option and record the outputs. Then, I sign-transform all "
        "of these outcomes and check, in each round, which option provided the better payoff-sign (ignoring the "
        "payoff size), if any. Can you assess which option yields more rounds with a strictly better payoff sign? "
    ) + _FEATURE_TAIL,
    "better_on_avg": _FEATURE_HEAD + _SIMULATE + (
        "In each round, I draw one outcome from each option and record the outputs. Then, for each option, I sum "
        "the payoffs each option yielded across all rounds. Can you assess which option yields a higher sum of "
        "payoffs, if any? "
    ) + _FEATURE_TAIL,
    "uniform": _FEATURE_HEAD + _SIMULATE + (
        "In each round, I first transform all payoffs in each option to be equally likely and then draw one "
        "outcome. That is, I transform each option's payoff distribution so that actual probabilities are "
        "ignored, and all its payoffs have the same probability to be drawn before I make draws from these "
        "transformed distributions. Then, I record the outputs and check, in each round, which option provided "
        "the better payoff, if any. Can you assess which option yields more rounds with a strictly better payoff "
        "under this transformation? "
    ) + _FEATURE_TAIL,
    "dominance": _FEATURE_HEAD + _SIMULATE + (
        "In each round, I draw one outcome from each option and check which option provided the better "
        "(higher) payoff, if any. Can you assess *if* one option yields a payoff that is at least as good as the "
        "other option payoff across *all* rounds? If this is not the case, please clearly state that by "
        "answering 'No'. "
    ) + _FEATURE_TAIL,
    "worst_case": _FEATURE_HEAD + (
        "Let's say I simulate these each of these options once, and each option yields its worst (lowest) "
        "payoff. Can you assess which option, if any, yields a better payoff in this scenario? "
    ) + _FEATURE_TAIL,
    "risk": _FEATURE_HEAD + (
        "Can you assess which option, if any, is riskier (i.e., has higher variance)? "
    ) + _FEATURE_TAIL,
}

FEATURE_REMINDER = "\n\nAnswer with exactly one of: 'Option A', 'Option B', 'No', or 'It is too hard to tell.'"

_SUBJECT_INSTRUCTIONS = {
    "binary": (
        "Given the following options, please make a choice for each problem and return only your choices "
        "in the format specified.",
        "(Problem ID, Choice) | (Problem ID, Choice) | ...",
    ),
    "confidence": (
        "Given the following options, please make a choice for each problem and decide what is your confidence "
        "(between 0 to 100) in your choice. Return only your choices and confidence in the format specified.",
        "(Problem ID, Choice, Confidence) | ...",
    ),
    "percentage": (
        "Given the following options, please indicate your preference for each problem as a percentage, where "
        "0% represents a complete preference for Option B and 100% represents a complete preference for "
        "Option A. Return your choices in the format specified.",
        "(Problem ID, Preference) | (Problem ID, Preference) | ...",
    ),
}

SUBJECT_REMINDER = {
    "binary": "\n\nReminder: reply with one tuple per problem, e.g. (1, A) | (2, B), where Choice is A or B.",
    "confidence": "\n\nReminder: reply with one tuple per problem, e.g. (1, A, 80) | (2, B, 65), "
    "where Choice is A or B and Confidence is a number from 0 to 100.",
    "percentage": "\n\nReminder: reply with one tuple per problem, e.g. (1, 70) | (2, 15), "
    "where Preference is a number from 0 to 100.",
}

_BAD_ID = re.compile(r"[(),|\n]")


def _texts(task: ChoiceTask) -> tuple[str, str]:
    a, b = task.option_a_text, task.option_b_text
    if not a or not b or not a.strip() or not b.strip():
        raise MissingText(f"task {task.task_id} lacks option text")
    return a, b


def render_finetune_prompt(task: ChoiceTask) -> str:
    a, b = _texts(task)
    return FINETUNE_TEMPLATE.format(A=a, B=b)


def render_feature_prompt(feature_name: str, task: ChoiceTask) -> str:
    if feature_name not in FEATURE_PROMPTS:
        raise KeyError(f"unknown feature {feature_name!r}")
    a, b = _texts(task)
    return FEATURE_PROMPTS[feature_name].replace("{A}", a).replace("{B}", b)


def render_subject_prompt(condition: str, personality: Optional[Personality], batch: Sequence[ChoiceTask]) -> str:
    if condition not in _SUBJECT_INSTRUCTIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if not batch:
        raise ValueError("batch must contain at least one task")
    instruction, fmt = _SUBJECT_INSTRUCTIONS[condition]
    lines = ["Instruction:"]
    if personality is not None:
        lines.append(personality.instruction())
    lines += [instruction, "", "Format:", fmt, "", "Problems:"]
    for task in batch:
        if _BAD_ID.search(task.task_id):
            raise ValueError(f"task id {task.task_id!r} cannot appear in the tuple format")
        a, b = _texts(task)
        lines += ["", f"Problem ID: {task.task_id}", f"Option A: {a}", f"Option B: {b}"]
    return "\n".join(lines)
